#include "cgrav/ephemeris.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cgrav/error.hpp"
#include "cgrav/kepler.hpp"

namespace cgrav {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularEvaluation: return "singular-evaluation";
    case ErrorCode::InsufficientHistory: return "insufficient-history";
    case ErrorCode::NearLuminalDegeneracy: return "near-luminal-degeneracy";
    case ErrorCode::UnsupportedOrbit: return "unsupported-orbit";
    case ErrorCode::UnboundOrbit: return "unbound-orbit";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::MalformedConfig: return "malformed-config";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Stiffness: return "stiffness";
  }
  return "unknown";
}

namespace {

constexpr std::array<std::string_view, 9> kNames = {"mercury", "venus",  "earth",   "mars", "jupiter",
                                                    "saturn",  "uranus", "neptune", "pluto"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double omega_from_combination(double combination, double a, double c) {
  return std::sqrt(c * c * combination / (a * a * a));
}

}  // namespace

std::string_view planet_name(PlanetId id) { return kNames[static_cast<std::size_t>(id) - 1]; }

std::optional<PlanetId> parse_planet(std::string_view name) {
  const auto key = lower(trim(name));
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (key == kNames[i]) return kAllPlanets[i];
  }
  return std::nullopt;
}

PlanetTable::PlanetTable(std::array<PlanetRecord, 9> records, Constants constants)
    : records_(records), constants_(constants) {
  if (!(constants_.c > 0.0)) throw Error(ErrorCode::Validation, "constants: c must be positive");
  if (!(constants_.G > 0.0)) throw Error(ErrorCode::Validation, "constants: G must be positive");
  if (!(constants_.sun_mass_parameter > 0.0))
    throw Error(ErrorCode::Validation, "constants: sun_mass_parameter must be positive");
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].id != kAllPlanets[i])
      throw Error(ErrorCode::Validation, "table: records out of order at index " + std::to_string(i));
    validate(records_[i], constants_.c);
  }
}

void validate(const PlanetRecord& r, double c) {
  const std::string who{planet_name(r.id)};
  auto fail = [&](std::string_view field, std::string_view why) {
    throw Error(ErrorCode::Validation, who + "." + std::string(field) + ": " + std::string(why));
  };
  if (!(r.eccentricity > 0.0 && r.eccentricity < 1.0)) fail("eccentricity", "must satisfy 0 < e < 1");
  if (!(r.semi_major > 0.0) || !std::isfinite(r.semi_major)) fail("semi_major", "must be positive");
  if (!(r.mean_frequency > 0.0) || !std::isfinite(r.mean_frequency)) fail("mean_frequency", "must be positive");
  if (!std::isfinite(r.inclination)) fail("inclination", "must be finite");
  if (!(r.omega2a3_over_c2 > 0.0)) fail("omega2a3_over_c2", "must be positive");
  const double a = r.semi_major;
  const double implied = r.mean_frequency * r.mean_frequency * a * a * a / (c * c);
  if (std::abs(r.omega2a3_over_c2 - implied) / r.omega2a3_over_c2 >= 1e-2)
    fail("omega2a3_over_c2", "inconsistent with mean_frequency and semi_major (>1% apart)");
}

PlanetTable builtin_table() {
  constexpr double c = kSpeedOfLight;
  struct Row {
    double e, a, combination, theta_deg;
  };
  // omega^2 a^3 / c^2 from the planetary-data appendix the orbits are calibrated against.
  constexpr std::array<Row, 9> rows = {{
      {0.21, 0.5791e11, 1477.0, 7.0},
      {0.007, 1.0821e11, 1477.0, 0.0},
      {0.017, 1.4960e11, 1477.0, 0.0},
      {0.093, 2.2794e11, 1477.0, 0.0},
      {0.048, 7.783e11, 1478.0, 0.0},
      {0.056, 14.27e11, 1477.0, 0.0},
      {0.047, 28.69e11, 1476.0, 0.0},
      {0.009, 44.98e11, 1478.0, 0.0},
      {0.249, 59.00e11, 1469.0, 0.0},
  }};
  // Earth's frequency is tabulated directly: omega_3 / c = 66.41e-17 1/m.
  constexpr double earth_omega_over_c = 66.41e-17;

  std::array<PlanetRecord, 9> records{};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    auto& r = records[i];
    r.id = kAllPlanets[i];
    r.eccentricity = row.e;
    r.semi_major = row.a;
    r.omega2a3_over_c2 = row.combination;
    r.mean_frequency = r.id == PlanetId::Earth ? earth_omega_over_c * c
                                               : omega_from_combination(row.combination, row.a, c);
    r.inclination = row.theta_deg * kPi / 180.0;
  }
  Constants constants;
  constants.c = c;
  constants.sun_mass_parameter = sun_mass_from_orbit(records[0], c);
  return PlanetTable(records, constants);
}

PlanetTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedConfig, "cannot open ephemeris file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_table(ss.str());
}

PlanetTable parse_table(std::string_view text) {
  const PlanetTable base = builtin_table();
  auto records = base.records();
  Constants constants = base.constants();
  bool explicit_mass = false;

  struct Touched {
    bool a = false, omega = false, combination = false;
  };
  std::array<Touched, 9> touched{};

  std::optional<std::size_t> section;  // planet index; 9 means [constants]
  bool in_section = false;
  int line_no = 0;
  std::istringstream lines{std::string(text)};
  std::string raw;
  auto bad = [&](const std::string& why) {
    throw Error(ErrorCode::MalformedConfig, "line " + std::to_string(line_no) + ": " + why);
  };

  while (std::getline(lines, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos)
      line = trim(line.substr(0, hash));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') bad("unterminated section header");
      const auto name = lower(trim(line.substr(1, line.size() - 2)));
      if (name == "constants") {
        section = 9;
      } else if (auto id = parse_planet(name)) {
        section = static_cast<std::size_t>(*id) - 1;
      } else {
        bad("unknown section '" + name + "'");
      }
      in_section = true;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) bad("expected key = value");
    if (!in_section) bad("key outside of any section");
    const auto key = lower(trim(line.substr(0, eq)));
    const auto sval = trim(line.substr(eq + 1));
    double value{};
    const auto* first = sval.data();
    const auto* last = sval.data() + sval.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || sval.empty()) bad("value for '" + key + "' is not a number");

    if (*section == 9) {
      if (key == "c_m_s") constants.c = value;
      else if (key == "g") constants.G = value;
      else if (key == "m10g_m3_s2") {
        constants.sun_mass_parameter = value;
        explicit_mass = true;
      } else bad("unknown key '" + key + "' in [constants]");
      continue;
    }

    auto& r = records[*section];
    auto& t = touched[*section];
    if (key == "e") r.eccentricity = value;
    else if (key == "a_m") {
      r.semi_major = value;
      t.a = true;
    } else if (key == "omega_rad_s") {
      r.mean_frequency = value;
      t.omega = true;
    } else if (key == "theta_deg") r.inclination = value * kPi / 180.0;
    else if (key == "theta_rad") r.inclination = value;
    else if (key == "omega2a3_over_c2_m") {
      r.omega2a3_over_c2 = value;
      t.combination = true;
    } else bad("unknown key '" + key + "' in [" + std::string(kNames[*section]) + "]");
  }

  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& r = records[i];
    const auto& t = touched[i];
    if ((t.a || t.omega) && !t.combination) {
      const double a = r.semi_major;
      r.omega2a3_over_c2 = r.mean_frequency * r.mean_frequency * a * a * a / (constants.c * constants.c);
    } else if (t.combination && !t.omega) {
      r.mean_frequency = omega_from_combination(r.omega2a3_over_c2, r.semi_major, constants.c);
    }
    validate(r, constants.c);
  }
  if (!explicit_mass) constants.sun_mass_parameter = sun_mass_from_orbit(records[0], constants.c);
  return PlanetTable(records, constants);
}

std::string serialize_table(const PlanetTable& table) {
  std::ostringstream out;
  const auto& k = table.constants();
  out << "[constants]\n"
      << "c_m_s = " << fmt17(k.c) << "\n"
      << "G = " << fmt17(k.G) << "\n"
      << "m10G_m3_s2 = " << fmt17(k.sun_mass_parameter) << "\n";
  for (const auto& r : table.records()) {
    out << "\n[" << planet_name(r.id) << "]\n"
        << "e = " << fmt17(r.eccentricity) << "\n"
        << "a_m = " << fmt17(r.semi_major) << "\n"
        << "omega_rad_s = " << fmt17(r.mean_frequency) << "\n"
        << "omega2a3_over_c2_m = " << fmt17(r.omega2a3_over_c2) << "\n"
        << "theta_rad = " << fmt17(r.inclination) << "\n";
  }
  return out.str();
}

}  // namespace cgrav
