#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hotspot {

using PersonId = std::uint32_t;
using SiteId = std::uint32_t;
using HouseholdId = std::uint32_t;

inline constexpr PersonId kNoPerson = std::numeric_limits<PersonId>::max();
inline constexpr SiteId kNoSite = std::numeric_limits<SiteId>::max();

inline constexpr double kHoursPerDay = 24.0;
inline constexpr double kHoursPerWeek = 168.0;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Age bands used for demographics, mobility rates and outcome probabilities.
enum class AgeGroup : std::uint8_t { A0_4, A5_14, A15_34, A35_59, A60_79, A80p };
inline constexpr std::size_t kNumAgeGroups = 6;

enum class SiteCategory : std::uint8_t { Education, Social, Transport, Work, Grocery };
inline constexpr std::size_t kNumCategories = 5;

template <class T>
using PerAge = std::array<T, kNumAgeGroups>;
template <class T>
using PerCategory = std::array<T, kNumCategories>;

inline constexpr std::array<std::string_view, kNumAgeGroups> kAgeGroupNames{
    "0-4", "5-14", "15-34", "35-59", "60-79", "80+"};
inline constexpr PerAge<int> kAgeGroupLowerBound{0, 5, 15, 35, 60, 80};
inline constexpr std::array<std::string_view, kNumCategories> kCategoryNames{
    "education", "social", "transport", "work", "grocery"};

constexpr std::size_t index_of(AgeGroup a) { return static_cast<std::size_t>(a); }
constexpr std::size_t index_of(SiteCategory c) { return static_cast<std::size_t>(c); }

std::optional<SiteCategory> parse_category(std::string_view name);
std::optional<AgeGroup> parse_age_group(std::string_view name);

/// Raised for malformed user input (files, configs, arguments).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Half-open time interval in hours.
struct Interval {
  double from = 0.0;
  double to = 0.0;

  [[nodiscard]] double length() const { return to > from ? to - from : 0.0; }
  [[nodiscard]] bool contains(double t) const { return t >= from && t < to; }
};

}  // namespace hotspot
