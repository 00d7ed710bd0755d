#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace facaderisk {

/// Load-bearing construction bucket. Index order is fixed and shared by
/// the structure head, confusion matrices, and manifests.
enum class BuildingStructure { ConcreteLike = 0, SteelLike = 1, WoodenLike = 2 };

/// Communal = multi-unit (apartment block), NonCommunal = single-unit.
enum class PropertyType { Communal = 0, NonCommunal = 1 };

/// Insurance rating class: H = non-fireproof, T = semi-fireproof,
/// M = fireproof.
enum class FireproofClass { H = 0, T = 1, M = 2 };

/// Raw source metadata category. Only the residential whitelist survives
/// ingestion; anything else is carried as Other until it is rejected.
struct RawPropertyCategory {
    enum Kind {
        Apartment = 0,
        House,
        SingleFamilyHouse,
        TerraceHouse,
        Townhouse,
        Sublease,
        Dormitory,
        Other
    };
    Kind kind = Other;
    std::string other_text;  // original string when kind == Other

    bool operator==(const RawPropertyCategory&) const = default;
};

/// Image-category verdict produced by a CategoryFilter.
enum class CategoryVerdict {
    EntireResidential = 0,
    NoResidential,
    InsideResidential,
    Other
};

inline constexpr int kNumStructures = 3;
inline constexpr int kNumPropertyTypes = 2;
inline constexpr int kNumFireproofClasses = 3;

/// Rule-based fireproof mapping. Total on the enumerated domain:
///   concrete-like / any          -> M
///   steel-like    / communal     -> M
///   steel-like    / non-communal -> T
///   wooden-like   / any          -> H
FireproofClass fireproof_class(BuildingStructure structure, PropertyType ptype) noexcept;

/// Raw category -> property type. Multi-unit categories are communal,
/// single-unit categories non-communal. Returns nullopt for Other,
/// signaling the record must be dropped at ingestion.
std::optional<PropertyType> property_type_of(const RawPropertyCategory& cat) noexcept;

// Manifest label strings (lowercase snake_case; fireproof uses H/T/M).
std::string to_string(BuildingStructure s);
std::string to_string(PropertyType p);
std::string to_string(FireproofClass f);
std::string to_string(const RawPropertyCategory& c);
std::string to_string(CategoryVerdict v);

std::optional<BuildingStructure> parse_structure(std::string_view s);
std::optional<PropertyType> parse_property_type(std::string_view s);
std::optional<FireproofClass> parse_fireproof(std::string_view s);
std::optional<CategoryVerdict> parse_verdict(std::string_view s);

/// Total: unknown strings become Other(text).
RawPropertyCategory parse_category(std::string_view s);

inline constexpr std::array<BuildingStructure, kNumStructures> kAllStructures = {
    BuildingStructure::ConcreteLike, BuildingStructure::SteelLike,
    BuildingStructure::WoodenLike};
inline constexpr std::array<PropertyType, kNumPropertyTypes> kAllPropertyTypes = {
    PropertyType::Communal, PropertyType::NonCommunal};
inline constexpr std::array<FireproofClass, kNumFireproofClasses> kAllFireproofClasses = {
    FireproofClass::H, FireproofClass::T, FireproofClass::M};

}  // namespace facaderisk
