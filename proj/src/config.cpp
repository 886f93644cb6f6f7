#include "msort/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace msort {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ValidationError("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line) {
  size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + v + "'");
  }
  if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
  return out;
}

long parse_long(const std::string& v, int line) {
  size_t pos = 0;
  long out = 0;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    fail(line, "expected an integer, got '" + v + "'");
  }
  if (pos != v.size()) fail(line, "trailing characters in integer '" + v + "'");
  return out;
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(line, "expected true/false, got '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& v, int line) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(line, "empty list entry");
    out.push_back(static_cast<int>(parse_long(item, line)));
  }
  if (out.empty()) fail(line, "empty list");
  return out;
}

std::vector<std::pair<double, double>> parse_centers(const std::string& v, int line) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(v);
  std::string pair;
  while (std::getline(ss, pair, ';')) {
    pair = trim(pair);
    if (pair.empty()) continue;
    std::stringstream ps(pair);
    std::string xs, ys, extra;
    if (!(ps >> xs >> ys)) fail(line, "channel center needs two coordinates");
    if (ps >> extra) fail(line, "too many coordinates in channel center");
    out.emplace_back(parse_double(xs, line), parse_double(ys, line));
  }
  if (out.empty()) fail(line, "no channel centers given");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.family.empty()) throw ValidationError("config: mode family required");
  if (cfg.family != "oam" && cfg.family != "radial" && cfg.family != "fullfield")
    throw ValidationError("config: unknown mode family '" + cfg.family + "'");
  if (cfg.pitch <= 0.0 || cfg.wavelength <= 0.0 || cfg.waist <= 0.0 ||
      cfg.channel_side <= 0.0 || cfg.focal <= 0.0)
    throw ValidationError("config: physical quantities must be positive");
  if (cfg.supersampling < 1)
    throw ValidationError("config: supersampling must be >= 1");
  if (cfg.steps < 1) throw ValidationError("config: steps must be >= 1");
  if (cfg.planes != 1 && cfg.planes != 2)
    throw ValidationError("config: planes must be 1 or 2");

  const BasisSpec basis = make_basis(cfg);
  const int d = basis.d();
  if (d < 2) throw ValidationError("config: dimension must be >= 2");
  if (cfg.d != 0 && cfg.d != d)
    throw ValidationError("config: d does not match the mode index lists");
  if (!cfg.centers.empty() && static_cast<int>(cfg.centers.size()) != d)
    throw ValidationError("config: channel count does not match dimension d=" +
                          std::to_string(d));
  if (cfg.mub != 0) {
    if (!is_prime(d))
      throw ValidationError("config: MUB selection requires a prime dimension");
    if (cfg.mub < 0 || cfg.mub > d)
      throw ValidationError("config: mub index must be in 0.." + std::to_string(d));
  }
  make_layout(cfg);  // throws on overlap / out-of-aperture channels
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  bool mutate_start_set = false;

  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "grid" && section != "mode" && section != "layout" &&
          section != "sorter" && section != "ga" && section != "output")
        fail(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) fail(line, "empty key or value");

    if (section == "grid") {
      if (key == "n") cfg.n = static_cast<int>(parse_long(value, line));
      else if (key == "pitch") cfg.pitch = parse_double(value, line);
      else if (key == "wavelength") cfg.wavelength = parse_double(value, line);
      else if (key == "supersampling") cfg.supersampling = static_cast<int>(parse_long(value, line));
      else fail(line, "unknown key '" + key + "' in [grid]");
    } else if (section == "mode") {
      if (key == "family") cfg.family = value;
      else if (key == "d") cfg.d = static_cast<int>(parse_long(value, line));
      else if (key == "waist") cfg.waist = parse_double(value, line);
      else if (key == "ell") cfg.ells = parse_int_list(value, line);
      else if (key == "p") cfg.ps = parse_int_list(value, line);
      else if (key == "mub")
        cfg.mub = value == "computational" ? 0 : static_cast<int>(parse_long(value, line));
      else fail(line, "unknown key '" + key + "' in [mode]");
    } else if (section == "layout") {
      if (key == "side") cfg.channel_side = parse_double(value, line);
      else if (key == "centers") cfg.centers = parse_centers(value, line);
      else fail(line, "unknown key '" + key + "' in [layout]");
    } else if (section == "sorter") {
      if (key == "planes") cfg.planes = static_cast<int>(parse_long(value, line));
      else if (key == "focal") cfg.focal = parse_double(value, line);
      else if (key == "steps") cfg.steps = static_cast<int>(parse_long(value, line));
      else fail(line, "unknown key '" + key + "' in [sorter]");
    } else if (section == "ga") {
      if (key == "population") cfg.ga.population = static_cast<int>(parse_long(value, line));
      else if (key == "m") cfg.ga.m = static_cast<int>(parse_long(value, line));
      else if (key == "blur_sigma") cfg.ga.blur_sigma = parse_double(value, line);
      else if (key == "mutate_frac_start") {
        cfg.ga.mutate_frac_start = parse_double(value, line);
        mutate_start_set = true;
      }
      else if (key == "mutate_frac_end") cfg.ga.mutate_frac_end = parse_double(value, line);
      else if (key == "mutate_amp") cfg.ga.mutate_amp = parse_double(value, line);
      else if (key == "rank_tau") {
        cfg.ga.rank_tau = parse_double(value, line);
        cfg.rank_tau_given = true;
      }
      else if (key == "switch_at") cfg.ga.switch_at = parse_long(value, line);
      else if (key == "budget") cfg.ga.budget = parse_long(value, line);
      else if (key == "seed") cfg.ga.seed = static_cast<std::uint64_t>(parse_long(value, line));
      else if (key == "blur_children") cfg.ga.blur_children = parse_bool(value, line);
      else if (key == "early_stop") cfg.ga.early_stop = parse_bool(value, line);
      else fail(line, "unknown key '" + key + "' in [ga]");
    } else if (section == "output") {
      if (key == "dir") cfg.output_dir = value;
      else if (key == "checkpoint_interval") cfg.checkpoint_interval = parse_long(value, line);
      else fail(line, "unknown key '" + key + "' in [output]");
    } else {
      fail(line, "key outside any section");
    }
  }
  (void)mutate_start_set;

  cfg.ga.macro_pitch = cfg.pitch;
  cfg.ga.planes = cfg.planes;
  if (!cfg.rank_tau_given) cfg.ga.rank_tau = cfg.ga.population / 3.0;
  validate_config(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[grid]\n";
  out << "n = " << cfg.n << '\n';
  out << "pitch = " << fmt(cfg.pitch) << '\n';
  out << "wavelength = " << fmt(cfg.wavelength) << '\n';
  out << "supersampling = " << cfg.supersampling << '\n';
  out << "\n[mode]\n";
  out << "family = " << cfg.family << '\n';
  if (cfg.d != 0) out << "d = " << cfg.d << '\n';
  out << "waist = " << fmt(cfg.waist) << '\n';
  auto write_list = [&](const char* key, const std::vector<int>& v) {
    if (v.empty()) return;
    out << key << " = ";
    for (size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
    out << '\n';
  };
  write_list("ell", cfg.ells);
  write_list("p", cfg.ps);
  out << "mub = " << cfg.mub << '\n';
  out << "\n[layout]\n";
  out << "side = " << fmt(cfg.channel_side) << '\n';
  if (!cfg.centers.empty()) {
    out << "centers = ";
    for (size_t i = 0; i < cfg.centers.size(); ++i)
      out << (i ? "; " : "") << fmt(cfg.centers[i].first) << ' '
          << fmt(cfg.centers[i].second);
    out << '\n';
  }
  out << "\n[sorter]\n";
  out << "planes = " << cfg.planes << '\n';
  out << "focal = " << fmt(cfg.focal) << '\n';
  out << "steps = " << cfg.steps << '\n';
  out << "\n[ga]\n";
  out << "population = " << cfg.ga.population << '\n';
  out << "m = " << cfg.ga.m << '\n';
  out << "blur_sigma = " << fmt(cfg.ga.blur_sigma) << '\n';
  out << "mutate_frac_start = " << fmt(cfg.ga.mutate_frac_start) << '\n';
  out << "mutate_frac_end = " << fmt(cfg.ga.mutate_frac_end) << '\n';
  out << "mutate_amp = " << fmt(cfg.ga.mutate_amp) << '\n';
  out << "rank_tau = " << fmt(cfg.ga.rank_tau) << '\n';
  out << "switch_at = " << cfg.ga.switch_at << '\n';
  out << "budget = " << cfg.ga.budget << '\n';
  out << "seed = " << cfg.ga.seed << '\n';
  out << "blur_children = " << (cfg.ga.blur_children ? "true" : "false") << '\n';
  out << "early_stop = " << (cfg.ga.early_stop ? "true" : "false") << '\n';
  out << "\n[output]\n";
  out << "dir = " << cfg.output_dir << '\n';
  out << "checkpoint_interval = " << cfg.checkpoint_interval << '\n';
  return out.str();
}

Grid make_grid(const RunConfig& cfg) {
  return Grid(cfg.n, cfg.pitch / cfg.supersampling, cfg.wavelength);
}

BasisSpec make_basis(const RunConfig& cfg) {
  if (cfg.family == "oam") {
    if (!cfg.ells.empty()) {
      std::vector<int> ells = cfg.ells;
      std::sort(ells.begin(), ells.end());
      BasisSpec b;
      for (int l : ells) b.modes.push_back({l, 0, cfg.waist});
      return b;
    }
    if (cfg.d == 0) throw ValidationError("config: oam family needs d or an ell list");
    return oam_basis(cfg.d, cfg.waist);
  }
  if (cfg.family == "radial") {
    if (!cfg.ps.empty()) {
      std::vector<int> ps = cfg.ps;
      std::sort(ps.begin(), ps.end());
      BasisSpec b;
      for (int p : ps) b.modes.push_back({0, p, cfg.waist});
      return b;
    }
    if (cfg.d == 0) throw ValidationError("config: radial family needs d or a p list");
    return radial_basis(cfg.d, cfg.waist);
  }
  // fullfield
  std::vector<int> ells = cfg.ells.empty() ? std::vector<int>{-1, 0, 1} : cfg.ells;
  std::vector<int> ps = cfg.ps.empty() ? std::vector<int>{0, 1} : cfg.ps;
  return fullfield_basis(ells, ps, cfg.waist);
}

ChannelLayout make_layout(const RunConfig& cfg) {
  const BasisSpec basis = make_basis(cfg);
  const int d = basis.d();
  ChannelLayout layout;
  const double side = cfg.channel_side;
  if (!cfg.centers.empty()) {
    for (const auto& [x, y] : cfg.centers) layout.channels.push_back({x, y, side});
  } else if (d == 2) {
    // Opposite corners.
    layout.channels.push_back({-0.6e-3, -0.6e-3, side});
    layout.channels.push_back({0.6e-3, 0.6e-3, side});
  } else if (cfg.family == "fullfield") {
    // (p, ell) lexicographic: ell runs horizontally, p vertically.
    std::vector<int> ells, ps;
    for (const LGSpec& m : basis.modes) {
      if (std::find(ells.begin(), ells.end(), m.ell) == ells.end()) ells.push_back(m.ell);
      if (std::find(ps.begin(), ps.end(), m.p) == ps.end()) ps.push_back(m.p);
    }
    std::sort(ells.begin(), ells.end());
    std::sort(ps.begin(), ps.end());
    const double dx = 0.4e-3;
    for (size_t ip = 0; ip < ps.size(); ++ip)
      for (size_t il = 0; il < ells.size(); ++il)
        layout.channels.push_back(
            {dx * (static_cast<double>(il) - (ells.size() - 1) / 2.0),
             dx * (static_cast<double>(ip) - (ps.size() - 1) / 2.0), side});
  } else {
    const double dx = 0.4e-3;
    for (int i = 0; i < d; ++i)
      layout.channels.push_back({dx * (i - (d - 1) / 2.0), 0.0, side});
  }

  // Channels must lie inside the aperture and be pairwise disjoint.
  const double half = cfg.n * (cfg.pitch / cfg.supersampling) / 2.0;
  for (const Channel& c : layout.channels)
    if (std::abs(c.cx) + c.side / 2.0 > half || std::abs(c.cy) + c.side / 2.0 > half)
      throw ValidationError("config: channel outside the grid aperture");
  for (size_t i = 0; i < layout.channels.size(); ++i)
    for (size_t j = i + 1; j < layout.channels.size(); ++j) {
      const Channel& a = layout.channels[i];
      const Channel& b = layout.channels[j];
      if (std::abs(a.cx - b.cx) < (a.side + b.side) / 2.0 &&
          std::abs(a.cy - b.cy) < (a.side + b.side) / 2.0)
        throw ValidationError("config: overlapping channels");
    }
  return layout;
}

SorterSetup make_setup(const RunConfig& cfg) {
  SorterSetup setup;
  setup.planes = cfg.planes;
  setup.focal = cfg.focal;
  setup.grid = make_grid(cfg);
  setup.layout = make_layout(cfg);
  setup.steps = cfg.steps;
  return setup;
}

std::vector<ComplexField> make_inputs(const RunConfig& cfg) {
  const Grid grid = make_grid(cfg);
  const BasisSpec basis = make_basis(cfg);
  const int d = basis.d();
  std::vector<ComplexField> inputs;
  inputs.reserve(d);
  if (cfg.mub == 0) {
    for (const LGSpec& m : basis.modes) inputs.push_back(sample_lg(grid, m));
  } else {
    const MubFamily fam = mub_family(d);
    const Cmatrix& b = fam.bases[cfg.mub];
    for (int j = 0; j < d; ++j) {
      ModeVector v;
      v.basis = basis;
      v.coeffs.resize(d);
      for (int l = 0; l < d; ++l) v.coeffs[l] = b.at(l, j);
      inputs.push_back(sample_vector(grid, v));
    }
  }
  return inputs;
}

}  // namespace msort
