#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace cgrav {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

/// Physical constants shared by all computations. SI units, c explicit everywhere.
struct Constants {
  double c = kSpeedOfLight;      // m/s
  double G = 6.673e-11;          // m^3 kg^-1 s^-2
  double sun_mass_parameter{};   // m10 G, m^3/s^2
  friend bool operator==(const Constants&, const Constants&) = default;
};

/// Planets numbered as k = 1..9; the Sun (k = 10) is the fixed central body.
enum class PlanetId { Mercury = 1, Venus, Earth, Mars, Jupiter, Saturn, Uranus, Neptune, Pluto };

inline constexpr std::array<PlanetId, 9> kAllPlanets = {
    PlanetId::Mercury, PlanetId::Venus,  PlanetId::Earth,   PlanetId::Mars, PlanetId::Jupiter,
    PlanetId::Saturn,  PlanetId::Uranus, PlanetId::Neptune, PlanetId::Pluto};

std::string_view planet_name(PlanetId id);  // lower case, as used in config sections and the CLI
std::optional<PlanetId> parse_planet(std::string_view name);  // case-insensitive

struct PlanetRecord {
  PlanetId id{PlanetId::Mercury};
  double eccentricity{};     // e_k
  double semi_major{};       // a_k, m
  double mean_frequency{};   // omega_k, rad/s
  double omega2a3_over_c2{}; // omega_k^2 a_k^3 / c^2, m
  double inclination{};      // theta_k, rad

  /// omega^2 a^2 / c^2, the small parameter of every relativistic correction.
  double velocity_ratio2(double c) const {
    const double beta = mean_frequency * semi_major / c;
    return beta * beta;
  }

  friend bool operator==(const PlanetRecord&, const PlanetRecord&) = default;
};

/// Immutable after construction.
class PlanetTable {
 public:
  PlanetTable(std::array<PlanetRecord, 9> records, Constants constants);

  const PlanetRecord& at(PlanetId id) const { return records_[index(id)]; }
  const std::array<PlanetRecord, 9>& records() const { return records_; }
  const Constants& constants() const { return constants_; }
  double c() const { return constants_.c; }

  friend bool operator==(const PlanetTable&, const PlanetTable&) = default;

 private:
  static std::size_t index(PlanetId id) { return static_cast<std::size_t>(id) - 1; }

  std::array<PlanetRecord, 9> records_;
  Constants constants_;
};

/// Throws Error{Validation} naming the offending field.
void validate(const PlanetRecord& record, double c);

/// The nine-planet table with m10 G derived from Mercury's row.
PlanetTable builtin_table();

/// Applies INI overrides (one [planet] section per body, plus optional [constants]) over builtin_table().
PlanetTable load_table(const std::filesystem::path& path);
PlanetTable parse_table(std::string_view text);

/// Writes every field so that parse_table(serialize_table(t)) == t.
std::string serialize_table(const PlanetTable& table);

}  // namespace cgrav
