#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "facaderisk/image.hpp"
#include "facaderisk/labels.hpp"

namespace facaderisk {

/// Configuration of the procedural facade corpus. class_mix holds one
/// weight per (structure, ptype) pair, indexed structure * 2 + ptype; it
/// is normalized before use. The default mix is fireproof-M heavy with
/// the semi-fireproof T combination kept rare (< 5%).
struct SynthSpec {
    int n_properties = 100;
    int images_per_property_min = 1;
    int images_per_property_max = 3;
    int year_min = 1915;
    int year_max = 2025;
    double cue_strength = 1.0;
    std::uint64_t seed = 0;
    std::array<double, 6> class_mix = {0.30, 0.05, 0.25, 0.03, 0.07, 0.30};
    int image_size = 128;
    bool render_images = true;  // manifests alone are enough for split tests
};

struct SynthResult {
    std::filesystem::path property_manifest;
    std::filesystem::path image_manifest;
    std::size_t n_properties = 0;
    std::size_t n_images = 0;
};

/// Ground-truth attributes rendered into one facade image.
struct FacadeCues {
    int year = 1970;
    BuildingStructure structure = BuildingStructure::ConcreteLike;
    PropertyType ptype = PropertyType::Communal;
};

/// Linear year -> hue ramp over [year_min, year_max] (hue in [0, 0.8],
/// kept off the wrap-around so the map stays injective).
double year_hue(int year, int year_min, int year_max);

/// Renders one facade. Visual cues: every region shares the year hue
/// (facade, sky, windows differ in saturation/value, so the image mean
/// color tracks the year); window rows encode the structure bucket
/// (wooden 1-2 floors, steel 3-4, concrete 5+); building width and door
/// count encode the property type. jitter_seed perturbs placement and
/// shading only, never the cues.
Image render_facade(const FacadeCues& cues, int image_size,
                    std::uint64_t jitter_seed, int year_min, int year_max);

/// Renders the corpus and writes `properties.jsonl`, `images.jsonl` and
/// `images/*.png` into out_dir. Deterministic given spec.seed; manifest
/// labels always satisfy fireproof = fireproof_class(structure, ptype).
SynthResult generate(const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace facaderisk
