#include <doctest.h>

#include <map>

#include "facaderisk/labels.hpp"

using namespace facaderisk;

TEST_CASE("fireproof mapping matches the rule table") {
    CHECK(fireproof_class(BuildingStructure::ConcreteLike, PropertyType::Communal) ==
          FireproofClass::M);
    CHECK(fireproof_class(BuildingStructure::ConcreteLike, PropertyType::NonCommunal) ==
          FireproofClass::M);
    CHECK(fireproof_class(BuildingStructure::SteelLike, PropertyType::Communal) ==
          FireproofClass::M);
    CHECK(fireproof_class(BuildingStructure::SteelLike, PropertyType::NonCommunal) ==
          FireproofClass::T);
    CHECK(fireproof_class(BuildingStructure::WoodenLike, PropertyType::Communal) ==
          FireproofClass::H);
    CHECK(fireproof_class(BuildingStructure::WoodenLike, PropertyType::NonCommunal) ==
          FireproofClass::H);
}

TEST_CASE("fireproof mapping is exhaustive with the expected class counts") {
    std::map<FireproofClass, int> counts;
    for (auto s : kAllStructures) {
        for (auto p : kAllPropertyTypes) {
            ++counts[fireproof_class(s, p)];
        }
    }
    CHECK(counts[FireproofClass::M] == 3);
    CHECK(counts[FireproofClass::T] == 1);
    CHECK(counts[FireproofClass::H] == 2);
}

TEST_CASE("severity is monotone in the structure bucket") {
    for (auto p : kAllPropertyTypes) {
        CHECK(fireproof_class(BuildingStructure::WoodenLike, p) == FireproofClass::H);
        CHECK(fireproof_class(BuildingStructure::ConcreteLike, p) == FireproofClass::M);
    }
}

TEST_CASE("fireproof mapping is deterministic") {
    for (auto s : kAllStructures) {
        for (auto p : kAllPropertyTypes) {
            CHECK(fireproof_class(s, p) == fireproof_class(s, p));
        }
    }
}

TEST_CASE("raw categories map to property types through the whitelist") {
    CHECK(property_type_of({RawPropertyCategory::Apartment, {}}) == PropertyType::Communal);
    CHECK(property_type_of({RawPropertyCategory::Dormitory, {}}) == PropertyType::Communal);
    CHECK(property_type_of({RawPropertyCategory::Sublease, {}}) == PropertyType::Communal);
    CHECK(property_type_of({RawPropertyCategory::House, {}}) == PropertyType::NonCommunal);
    CHECK(property_type_of({RawPropertyCategory::SingleFamilyHouse, {}}) ==
          PropertyType::NonCommunal);
    CHECK(property_type_of({RawPropertyCategory::TerraceHouse, {}}) ==
          PropertyType::NonCommunal);
    CHECK(property_type_of({RawPropertyCategory::Townhouse, {}}) == PropertyType::NonCommunal);
    CHECK_FALSE(property_type_of({RawPropertyCategory::Other, "Office"}).has_value());
}

TEST_CASE("label strings round-trip") {
    for (auto s : kAllStructures) CHECK(parse_structure(to_string(s)) == s);
    for (auto p : kAllPropertyTypes) CHECK(parse_property_type(to_string(p)) == p);
    for (auto f : kAllFireproofClasses) CHECK(parse_fireproof(to_string(f)) == f);
    CHECK_FALSE(parse_structure("brick").has_value());

    CHECK(parse_category("apartment").kind == RawPropertyCategory::Apartment);
    CHECK(parse_category("single_family_house").kind ==
          RawPropertyCategory::SingleFamilyHouse);
    const auto other = parse_category("Office");
    CHECK(other.kind == RawPropertyCategory::Other);
    CHECK(other.other_text == "Office");
}
