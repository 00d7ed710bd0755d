#include <doctest.h>

#include "facaderisk/error.hpp"
#include "facaderisk/split.hpp"
#include "test_support.hpp"

using namespace facaderisk;
using test_support::make_property;

namespace {

std::vector<PropertyRecord> corpus(int n) {
    std::vector<PropertyRecord> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "p%05d", i);
        out.push_back(make_property(id, 1980, BuildingStructure::ConcreteLike,
                                    RawPropertyCategory::Apartment));
    }
    return out;
}

}  // namespace

TEST_CASE("identical inputs produce identical assignments") {
    const auto records = corpus(200);
    const auto a = split_properties(records, 42, 0.8);
    const auto b = split_properties(records, 42, 0.8);
    CHECK(a.by_property == b.by_property);
}

TEST_CASE("1000 properties at fraction 0.8 land in the [780, 820] band") {
    const auto records = corpus(1000);
    const auto split = split_properties(records, 42, 0.8);
    int train = 0;
    for (const auto& [id, s] : split.by_property) {
        if (s == Split::Train) ++train;
    }
    CHECK(train >= 780);
    CHECK(train <= 820);
}

TEST_CASE("train and test sets partition the corpus") {
    const auto records = corpus(500);
    const auto split = split_properties(records, 7, 0.8);
    CHECK(split.by_property.size() == records.size());
    for (const auto& r : records) {
        const Split s = split.of(r.property_id);
        CHECK((s == Split::Train || s == Split::Test));
    }
}

TEST_CASE("adding properties never reshuffles existing assignments") {
    const auto small = corpus(300);
    auto large = corpus(400);
    const auto split_small = split_properties(small, 99, 0.8);
    const auto split_large = split_properties(large, 99, 0.8);
    for (const auto& r : small) {
        CHECK(split_small.of(r.property_id) == split_large.of(r.property_id));
    }
}

TEST_CASE("all images of a property inherit its assignment") {
    // the assignment is a pure function of (seed, property_id), so any
    // number of images per property sees the same value
    for (int i = 0; i < 50; ++i) {
        const std::string pid = "prop" + std::to_string(i);
        const Split first = assign_split(3, pid, 0.8);
        for (int img = 0; img < 5; ++img) {
            CHECK(assign_split(3, pid, 0.8) == first);
        }
    }
}

TEST_CASE("duplicate property ids are a hard error") {
    auto records = corpus(3);
    records.push_back(records.front());
    CHECK_THROWS_AS(split_properties(records, 1, 0.8), Error);
}

TEST_CASE("train fraction outside (0,1) is rejected") {
    const auto records = corpus(3);
    CHECK_THROWS_AS(split_properties(records, 1, 0.0), Error);
    CHECK_THROWS_AS(split_properties(records, 1, 1.0), Error);
    CHECK_THROWS_AS(split_properties(records, 1, -0.5), Error);
}

TEST_CASE("split file round-trips and is byte-stable") {
    const auto dir = test_support::scratch_dir("split_file");
    const auto records = corpus(100);
    const auto split = split_properties(records, 5, 0.8);
    save_split(dir / "a.tsv", split);
    save_split(dir / "b.tsv", split);
    CHECK(test_support::read_file(dir / "a.tsv") == test_support::read_file(dir / "b.tsv"));

    const auto loaded = load_split(dir / "a.tsv");
    CHECK(loaded.by_property == split.by_property);
}
