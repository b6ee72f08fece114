#include "forge/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "forge/rational.hpp"

namespace forge::io {

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
    ++pos;
  if (pos != s.size())
    throw std::invalid_argument("malformed numeric field: " + s);
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

void ensure_parent_dir(const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

}  // namespace

json poly_to_json(const PolyQ& p) {
  json terms = json::array();
  for (const auto& [exps, coeff] : p.terms()) {
    json t;
    t["exps"] = exps;
    t["num"] = coeff.get_num().get_str();
    t["den"] = coeff.get_den().get_str();
    terms.push_back(std::move(t));
  }
  json j;
  j["nvars"] = p.nvars();
  j["terms"] = std::move(terms);
  return j;
}

PolyQ poly_from_json(const json& j) {
  if (!j.is_object() || !j.contains("nvars") || !j.contains("terms"))
    throw std::invalid_argument("polynomial JSON needs nvars and terms");
  PolyQ p(j.at("nvars").get<int>());
  for (const auto& t : j.at("terms")) {
    MultiIndex exps = t.at("exps").get<MultiIndex>();
    if (static_cast<int>(exps.size()) != p.nvars())
      throw std::invalid_argument("polynomial JSON: exponent arity mismatch");
    Rational c = rational_from_string(t.at("num").get<std::string>() + "/" +
                                      t.at("den").get<std::string>());
    p.add_term(exps, c);
  }
  return p;
}

json mixing_to_json(const MixingMeasure& m) {
  json components = json::array();
  for (std::size_t i = 0; i < m.cloud.size(); ++i) {
    json c;
    c["prob"] = m.cloud.probs[i];
    c["weights"] = m.cloud.points[i];
    components.push_back(std::move(c));
  }
  json j;
  j["atoms"] = m.atoms;
  j["components"] = std::move(components);
  return j;
}

MixingMeasure mixing_from_json(const json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j.contains("components"))
    throw std::invalid_argument("mixing measure JSON needs atoms, components");
  MixingMeasure m;
  m.atoms = j.at("atoms").get<std::vector<double>>();
  const json& comps = j.at("components");
  if (!comps.is_array() || comps.empty())
    throw std::invalid_argument("mixing measure JSON: empty component list");
  m.cloud.d = static_cast<int>(m.atoms.size());
  for (const auto& c : comps) {
    std::vector<double> w = c.at("weights").get<std::vector<double>>();
    if (w.size() != m.atoms.size())
      throw std::invalid_argument("mixing measure JSON: weight arity mismatch");
    m.cloud.points.push_back(std::move(w));
    m.cloud.probs.push_back(c.at("prob").get<double>());
  }
  m.cloud.validate();
  return m;
}

std::string lattice_law_csv(const LatticeLaw& law) {
  std::string out = "value,probability\n";
  for (std::size_t i = 0; i < law.values.size(); ++i) {
    out += format_double(law.values[i]);
    out += ',';
    out += format_double(law.probs[i]);
    out += '\n';
  }
  return out;
}

LatticeLaw lattice_law_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("lattice law CSV: empty input");
  {
    auto header = split_csv_line(line);
    if (header.size() != 2 || header[0] != "value" ||
        header[1] != "probability")
      throw std::invalid_argument(
          "lattice law CSV: expected header value,probability");
  }
  LatticeLaw law;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw std::invalid_argument("lattice law CSV: malformed row: " + line);
    law.values.push_back(parse_double(fields[0]));
    law.probs.push_back(parse_double(fields[1]));
  }
  if (law.values.empty())
    throw std::invalid_argument("lattice law CSV: no data rows");
  return law;
}

std::string path_csv(const PathSample& path) {
  std::string out = "t,value\n";
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    out += format_double(path.times[i]);
    out += ',';
    out += format_double(path.values[i]);
    out += '\n';
  }
  return out;
}

json hybrid_table_to_json(const HybridTable& table) {
  json values = json::array();
  for (const auto& z : table.values) {
    json v;
    v["im"] = z.imag();
    v["re"] = z.real();
    values.push_back(std::move(v));
  }
  json j;
  j["s_grid"] = table.s_grid;
  j["time"] = table.time;
  j["u_grid"] = table.u_grid;
  j["values"] = std::move(values);
  return j;
}

HybridTable hybrid_table_from_json(const json& j) {
  HybridTable t;
  t.time = j.at("time").get<double>();
  t.u_grid = j.at("u_grid").get<std::vector<double>>();
  t.s_grid = j.at("s_grid").get<std::vector<double>>();
  for (const auto& v : j.at("values"))
    t.values.emplace_back(v.at("re").get<double>(), v.at("im").get<double>());
  if (t.values.size() != t.u_grid.size() * t.s_grid.size())
    throw std::invalid_argument("hybrid table JSON: value count mismatch");
  return t;
}

namespace {

const char* family_name(CurveSpec::Family f) {
  switch (f) {
    case CurveSpec::Family::moment_curve: return "moment";
    case CurveSpec::Family::laplace_atoms: return "laplace_atoms";
    case CurveSpec::Family::laplace_convolution: return "laplace_convolution";
    case CurveSpec::Family::laplace_scaled: return "laplace_scaled";
    case CurveSpec::Family::poisson_LT: return "poisson";
    case CurveSpec::Family::power_curve: return "power";
    case CurveSpec::Family::complex_PQ: return "complex_pq";
    case CurveSpec::Family::rational_LT: return "rational";
  }
  throw std::logic_error("unknown curve family");
}

std::vector<Rational> rationals_from_json(const json& arr) {
  std::vector<Rational> out;
  for (const auto& v : arr)
    out.push_back(rational_from_string(v.get<std::string>()));
  return out;
}

json rationals_to_json(const std::vector<Rational>& v) {
  json arr = json::array();
  for (const auto& c : v) arr.push_back(to_string(c));
  return arr;
}

}  // namespace

json curve_spec_to_json(const CurveSpec& spec) {
  json j;
  j["family"] = family_name(spec.family);
  j["N"] = spec.N;
  switch (spec.family) {
    case CurveSpec::Family::moment_curve:
    case CurveSpec::Family::complex_PQ:
      break;
    case CurveSpec::Family::laplace_atoms:
      j["atoms"] = spec.atoms;
      break;
    case CurveSpec::Family::laplace_convolution:
    case CurveSpec::Family::laplace_scaled:
      j["base_atoms"] = spec.base_atoms;
      j["base_weights"] = spec.base_weights;
      break;
    case CurveSpec::Family::poisson_LT:
      j["lambda"] = spec.lambda;
      break;
    case CurveSpec::Family::power_curve:
      j["powers"] = spec.powers;
      break;
    case CurveSpec::Family::rational_LT:
      j["p"] = rationals_to_json(spec.rat_p.coeffs);
      j["q"] = rationals_to_json(spec.rat_q.coeffs);
      break;
  }
  return j;
}

CurveSpec curve_spec_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  const int N = j.at("N").get<int>();
  if (family == "moment") return CurveSpec::moment(N);
  if (family == "laplace_atoms")
    return CurveSpec::laplace(j.at("atoms").get<std::vector<double>>());
  if (family == "laplace_convolution")
    return CurveSpec::convolution(
        j.at("base_atoms").get<std::vector<double>>(),
        j.at("base_weights").get<std::vector<double>>(), N);
  if (family == "laplace_scaled")
    return CurveSpec::scaled(j.at("base_atoms").get<std::vector<double>>(),
                             j.at("base_weights").get<std::vector<double>>(),
                             N);
  if (family == "poisson")
    return CurveSpec::poisson(j.at("lambda").get<double>(), N);
  if (family == "power")
    return CurveSpec::power(j.at("powers").get<std::vector<long long>>());
  if (family == "complex_pq") return CurveSpec::complex_pq(N);
  if (family == "rational")
    return CurveSpec::rational(
        UniPolyQ::from_coeffs(rationals_from_json(j.at("p"))),
        UniPolyQ::from_coeffs(rationals_from_json(j.at("q"))), N);
  throw std::invalid_argument("unknown curve family: " + family);
}

namespace {
constexpr char kGridMagic[4] = {'F', 'G', 'R', 'D'};
constexpr std::uint32_t kGridVersion = 1;
}  // namespace

void write_grid_binary(const GridDensity& g, const std::string& path) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kGridMagic, 4);
  auto write_pod = [&out](const auto& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  write_pod(kGridVersion);
  std::int32_t d = g.d, m = g.m;
  write_pod(d);
  write_pod(m);
  write_pod(g.R);
  out.write(reinterpret_cast<const char*>(g.values.data()),
            static_cast<std::streamsize>(g.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("short write: " + path);
}

GridDensity read_grid_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kGridMagic, 4) != 0)
    throw std::runtime_error("not a grid container: " + path);
  auto read_pod = [&in, &path](auto& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw std::runtime_error("truncated grid container: " + path);
  };
  std::uint32_t version = 0;
  read_pod(version);
  if (version != kGridVersion)
    throw std::runtime_error("unsupported grid container version");
  std::int32_t d = 0, m = 0;
  double R = 0.0;
  read_pod(d);
  read_pod(m);
  read_pod(R);
  if (d < 1 || d > 8 || m < 2 || m > (1 << 20) || !(R > 0.0))
    throw std::runtime_error("grid container header out of range");
  GridDensity g;
  g.d = d;
  g.m = m;
  g.R = R;
  std::size_t cells = 1;
  for (int i = 0; i < d; ++i) {
    if (cells > (std::size_t(1) << 40) / static_cast<std::size_t>(m))
      throw std::runtime_error("grid container too large");
    cells *= static_cast<std::size_t>(m);
  }
  g.values.resize(cells);
  in.read(reinterpret_cast<char*>(g.values.data()),
          static_cast<std::streamsize>(cells * sizeof(double)));
  if (!in) throw std::runtime_error("truncated grid container: " + path);
  return g;
}

std::string grid_csv(const GridDensity& g) {
  if (g.d < 1 || g.d > 2)
    throw std::invalid_argument("grid CSV rendering supports d <= 2 only");
  std::string out;
  if (g.d == 1) {
    out = "x,value\n";
    for (int k = 0; k < g.m; ++k) {
      out += format_double(g.axis_coordinate(k));
      out += ',';
      out += format_double(g.values[static_cast<std::size_t>(k)]);
      out += '\n';
    }
  } else {
    out = "x0,x1,value\n";
    std::size_t idx = 0;
    for (int k0 = 0; k0 < g.m; ++k0)
      for (int k1 = 0; k1 < g.m; ++k1, ++idx) {
        out += format_double(g.axis_coordinate(k0));
        out += ',';
        out += format_double(g.axis_coordinate(k1));
        out += ',';
        out += format_double(g.values[idx]);
        out += '\n';
      }
  }
  return out;
}

json grid_to_json(const GridDensity& g) {
  json j;
  j["R"] = g.R;
  j["d"] = g.d;
  j["m"] = g.m;
  j["values"] = g.values;
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("short write: " + path);
}

json read_json_file(const std::string& path) {
  return json::parse(read_text_file(path));
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

void export_artifact(const std::string& in_path, const std::string& format,
                     const std::string& out_path) {
  const bool is_grid = in_path.size() > 5 &&
                       in_path.compare(in_path.size() - 5, 5, ".grid") == 0;
  const bool is_csv = in_path.size() > 4 &&
                      in_path.compare(in_path.size() - 4, 4, ".csv") == 0;
  if (is_grid) {
    GridDensity g = read_grid_binary(in_path);
    if (format == "csv") {
      write_text_file(out_path, grid_csv(g));
    } else if (format == "json") {
      write_json_file(out_path, grid_to_json(g));
    } else if (format == "binary-grid") {
      write_grid_binary(g, out_path);
    } else {
      throw std::invalid_argument("unsupported grid export format: " + format);
    }
    return;
  }
  if (is_csv) {
    LatticeLaw law = lattice_law_from_csv(read_text_file(in_path));
    if (format == "csv") {
      write_text_file(out_path, lattice_law_csv(law));
    } else if (format == "json") {
      json j;
      j["probabilities"] = law.probs;
      j["values"] = law.values;
      write_json_file(out_path, j);
    } else {
      throw std::invalid_argument("unsupported law export format: " + format);
    }
    return;
  }
  if (format == "json") {
    write_json_file(out_path, read_json_file(in_path));
    return;
  }
  throw std::invalid_argument("unsupported export: " + in_path + " -> " +
                              format);
}

}  // namespace forge::io
