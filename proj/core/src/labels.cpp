#include "facaderisk/labels.hpp"

namespace facaderisk {

FireproofClass fireproof_class(BuildingStructure structure, PropertyType ptype) noexcept {
    switch (structure) {
        case BuildingStructure::ConcreteLike:
            return FireproofClass::M;
        case BuildingStructure::SteelLike:
            return ptype == PropertyType::Communal ? FireproofClass::M
                                                   : FireproofClass::T;
        case BuildingStructure::WoodenLike:
            return FireproofClass::H;
    }
    return FireproofClass::H;  // unreachable
}

std::optional<PropertyType> property_type_of(const RawPropertyCategory& cat) noexcept {
    switch (cat.kind) {
        case RawPropertyCategory::Apartment:
        case RawPropertyCategory::Dormitory:
        case RawPropertyCategory::Sublease:
            return PropertyType::Communal;
        case RawPropertyCategory::House:
        case RawPropertyCategory::SingleFamilyHouse:
        case RawPropertyCategory::TerraceHouse:
        case RawPropertyCategory::Townhouse:
            return PropertyType::NonCommunal;
        case RawPropertyCategory::Other:
            return std::nullopt;
    }
    return std::nullopt;
}

std::string to_string(BuildingStructure s) {
    switch (s) {
        case BuildingStructure::ConcreteLike: return "concrete_like";
        case BuildingStructure::SteelLike: return "steel_like";
        case BuildingStructure::WoodenLike: return "wooden_like";
    }
    return "?";
}

std::string to_string(PropertyType p) {
    return p == PropertyType::Communal ? "communal" : "non_communal";
}

std::string to_string(FireproofClass f) {
    switch (f) {
        case FireproofClass::H: return "H";
        case FireproofClass::T: return "T";
        case FireproofClass::M: return "M";
    }
    return "?";
}

std::string to_string(const RawPropertyCategory& c) {
    switch (c.kind) {
        case RawPropertyCategory::Apartment: return "apartment";
        case RawPropertyCategory::House: return "house";
        case RawPropertyCategory::SingleFamilyHouse: return "single_family_house";
        case RawPropertyCategory::TerraceHouse: return "terrace_house";
        case RawPropertyCategory::Townhouse: return "townhouse";
        case RawPropertyCategory::Sublease: return "sublease";
        case RawPropertyCategory::Dormitory: return "dormitory";
        case RawPropertyCategory::Other: return c.other_text;
    }
    return c.other_text;
}

std::string to_string(CategoryVerdict v) {
    switch (v) {
        case CategoryVerdict::EntireResidential: return "entire_residential";
        case CategoryVerdict::NoResidential: return "no_residential";
        case CategoryVerdict::InsideResidential: return "inside_residential";
        case CategoryVerdict::Other: return "other";
    }
    return "other";
}

std::optional<BuildingStructure> parse_structure(std::string_view s) {
    if (s == "concrete_like") return BuildingStructure::ConcreteLike;
    if (s == "steel_like") return BuildingStructure::SteelLike;
    if (s == "wooden_like") return BuildingStructure::WoodenLike;
    return std::nullopt;
}

std::optional<PropertyType> parse_property_type(std::string_view s) {
    if (s == "communal") return PropertyType::Communal;
    if (s == "non_communal") return PropertyType::NonCommunal;
    return std::nullopt;
}

std::optional<FireproofClass> parse_fireproof(std::string_view s) {
    if (s == "H") return FireproofClass::H;
    if (s == "T") return FireproofClass::T;
    if (s == "M") return FireproofClass::M;
    return std::nullopt;
}

std::optional<CategoryVerdict> parse_verdict(std::string_view s) {
    if (s == "entire_residential") return CategoryVerdict::EntireResidential;
    if (s == "no_residential") return CategoryVerdict::NoResidential;
    if (s == "inside_residential") return CategoryVerdict::InsideResidential;
    if (s == "other") return CategoryVerdict::Other;
    return std::nullopt;
}

RawPropertyCategory parse_category(std::string_view s) {
    if (s == "apartment") return {RawPropertyCategory::Apartment, {}};
    if (s == "house") return {RawPropertyCategory::House, {}};
    if (s == "single_family_house") return {RawPropertyCategory::SingleFamilyHouse, {}};
    if (s == "terrace_house") return {RawPropertyCategory::TerraceHouse, {}};
    if (s == "townhouse") return {RawPropertyCategory::Townhouse, {}};
    if (s == "sublease") return {RawPropertyCategory::Sublease, {}};
    if (s == "dormitory") return {RawPropertyCategory::Dormitory, {}};
    return {RawPropertyCategory::Other, std::string(s)};
}

}  // namespace facaderisk
