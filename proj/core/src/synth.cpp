#include "facaderisk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "facaderisk/error.hpp"
#include "facaderisk/manifest.hpp"
#include "facaderisk/rng.hpp"

namespace facaderisk {

namespace fs = std::filesystem;

namespace {

struct Rgb {
    std::uint8_t r, g, b;
};

Rgb hsv_to_rgb(double h, double s, double v) {
    h = h - std::floor(h);
    const double c = v * s;
    const double hp = h * 6.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else { r = c; b = x; }
    const double m = v - c;
    auto q = [](double t) {
        return static_cast<std::uint8_t>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
    };
    return {q(r + m), q(g + m), q(b + m)};
}

void fill_rect(Image& img, int x0, int y0, int x1, int y1, Rgb c) {
    x0 = std::clamp(x0, 0, img.width);
    x1 = std::clamp(x1, 0, img.width);
    y0 = std::clamp(y0, 0, img.height);
    y1 = std::clamp(y1, 0, img.height);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const std::size_t o = (static_cast<std::size_t>(y) * img.width + x) * 3;
            img.rgb[o] = c.r;
            img.rgb[o + 1] = c.g;
            img.rgb[o + 2] = c.b;
        }
    }
}

int floors_for(BuildingStructure s, Rng& rng) {
    switch (s) {
        case BuildingStructure::WoodenLike: return rng.uniform_int(1, 2);
        case BuildingStructure::SteelLike: return rng.uniform_int(3, 4);
        case BuildingStructure::ConcreteLike: return rng.uniform_int(5, 6);
    }
    return 1;
}

}  // namespace

double year_hue(int year, int year_min, int year_max) {
    if (year_max <= year_min) return 0.0;
    const double t = static_cast<double>(year - year_min) /
                     static_cast<double>(year_max - year_min);
    return 0.8 * std::clamp(t, 0.0, 1.0);
}

Image render_facade(const FacadeCues& cues, int image_size,
                    std::uint64_t jitter_seed, int year_min, int year_max) {
    const int S = image_size;
    Rng rng(jitter_seed);

    const double hue = year_hue(cues.year, year_min, year_max);

    Image img;
    img.width = S;
    img.height = S;
    img.rgb.resize(static_cast<std::size_t>(S) * S * 3);

    const int ground_y = S - S / 8;

    // Every region carries the year hue at (nearly) the same chroma
    // S*V, so the image-mean chroma vector tracks the hue independently
    // of building geometry; regions differ in value, which gives the
    // structure/ptype cues their edges.
    for (int y = 0; y < S; ++y) {
        const double v = 0.97 - 0.07 * (static_cast<double>(y) / S);
        const Rgb sky = hsv_to_rgb(hue, 0.40 / v, v);
        fill_rect(img, 0, y, S, y + 1, sky);
    }
    fill_rect(img, 0, ground_y, S, S, hsv_to_rgb(hue, 0.40 / 0.72, 0.72));

    // geometry driven by the cues
    const int floors = floors_for(cues.structure, rng);
    const int floor_h = std::max(7, S * 12 / 128);
    const int base_h = std::max(3, S * 6 / 128);
    const int building_h = floors * floor_h + base_h;

    const double width_frac = cues.ptype == PropertyType::Communal
                                  ? rng.uniform(0.72, 0.82)
                                  : rng.uniform(0.34, 0.42);
    const int building_w = std::max(8, static_cast<int>(S * width_frac));
    const int cx = S / 2 + rng.uniform_int(-S / 20, S / 20);
    const int bx0 = std::clamp(cx - building_w / 2, 0, S - 1);
    const int bx1 = std::clamp(bx0 + building_w, 0, S);
    const int by0 = ground_y - building_h;

    const double facade_v = 0.88 + rng.uniform(-0.02, 0.02);
    fill_rect(img, bx0, by0, bx1, ground_y, hsv_to_rgb(hue, 0.40 / facade_v, facade_v));

    // window grid: one row per floor
    const int margin = std::max(2, S * 2 / 128);
    const int win_w = std::max(4, S * 7 / 128);
    const int win_h = std::max(3, S * 6 / 128);
    const int gap = std::max(3, S * 5 / 128);
    const int usable = bx1 - bx0 - 2 * margin;
    const int n_win = std::max(1, (usable + gap) / (win_w + gap));
    const int row_span = n_win * win_w + (n_win - 1) * gap;
    const int wx_start = bx0 + margin + std::max(0, (usable - row_span) / 2);
    // window values alternate symmetrically around the facade value:
    // strong local edges for the floor-count cue, near-zero net shift of
    // the image mean
    for (int f = 0; f < floors; ++f) {
        const int floor_top = ground_y - base_h - (f + 1) * floor_h;
        const int wy0 = floor_top + (floor_h - win_h) / 2;
        for (int wIdx = 0; wIdx < n_win; ++wIdx) {
            const int wx0 = wx_start + wIdx * (win_w + gap);
            const double offset = ((f + wIdx) % 2 == 0) ? -0.13 : 0.13;
            const double wv =
                std::clamp(facade_v + offset + rng.uniform(-0.02, 0.02), 0.45, 0.98);
            fill_rect(img, wx0, wy0, wx0 + win_w, wy0 + win_h,
                      hsv_to_rgb(hue, 0.40 / wv, wv));
        }
    }

    // doors: several entrances for communal blocks, one otherwise
    const int door_w = std::max(4, S * 6 / 128);
    const int door_h = std::max(6, S * 10 / 128);
    const int n_doors = cues.ptype == PropertyType::Communal ? 3 : 1;
    for (int d = 0; d < n_doors; ++d) {
        const int slot = (bx1 - bx0) * (d + 1) / (n_doors + 1);
        const int dx0 = bx0 + slot - door_w / 2;
        fill_rect(img, dx0, ground_y - door_h, dx0 + door_w, ground_y,
                  hsv_to_rgb(hue, 0.40 / 0.60, 0.60));
    }

    return img;
}

SynthResult generate(const SynthSpec& spec, const fs::path& out_dir) {
    if (spec.cue_strength < 0.0 || spec.cue_strength > 1.0) {
        throw Error("cue_strength must be in [0, 1]");
    }
    if (spec.year_min < 1915 || spec.year_max > 2025 || spec.year_min > spec.year_max) {
        throw Error("year range must lie within [1915, 2025]");
    }
    if (spec.images_per_property_min < 1 ||
        spec.images_per_property_max < spec.images_per_property_min) {
        throw Error("invalid images-per-property range");
    }
    double mix_sum = 0.0;
    for (double w : spec.class_mix) {
        if (w < 0.0) throw Error("class_mix weights must be non-negative");
        mix_sum += w;
    }
    if (mix_sum <= 0.0) throw Error("class_mix must have positive mass");

    fs::create_directories(out_dir);
    const fs::path image_dir = out_dir / "images";
    if (spec.render_images) fs::create_directories(image_dir);

    std::vector<PropertyRecord> properties;
    std::vector<ImageRecord> images;
    properties.reserve(static_cast<std::size_t>(spec.n_properties));

    for (int p = 0; p < spec.n_properties; ++p) {
        Rng prng(derive_seed(spec.seed, 0xA11CEULL, static_cast<std::uint64_t>(p)));

        // draw the (structure, ptype) pair from the mix
        double u = prng.next_unit() * mix_sum;
        int pair = 0;
        for (; pair < 5; ++pair) {
            if (u < spec.class_mix[static_cast<std::size_t>(pair)]) break;
            u -= spec.class_mix[static_cast<std::size_t>(pair)];
        }
        const auto structure = static_cast<BuildingStructure>(pair / 2);
        const auto ptype = static_cast<PropertyType>(pair % 2);
        const int year = prng.uniform_int(spec.year_min, spec.year_max);
        const int n_images =
            prng.uniform_int(spec.images_per_property_min, spec.images_per_property_max);

        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "p%06d", p);

        PropertyRecord rec;
        rec.property_id = idbuf;
        rec.construction_year = year;
        rec.structure = structure;
        // pick a raw category consistent with the property type
        Rng crng(derive_seed(spec.seed, 0xCA7ULL, static_cast<std::uint64_t>(p)));
        if (ptype == PropertyType::Communal) {
            const std::array<RawPropertyCategory::Kind, 3> kinds = {
                RawPropertyCategory::Apartment, RawPropertyCategory::Apartment,
                RawPropertyCategory::Dormitory};
            rec.raw_category = {kinds[static_cast<std::size_t>(crng.uniform_int(0, 2))], {}};
        } else {
            const std::array<RawPropertyCategory::Kind, 4> kinds = {
                RawPropertyCategory::House, RawPropertyCategory::SingleFamilyHouse,
                RawPropertyCategory::TerraceHouse, RawPropertyCategory::Townhouse};
            rec.raw_category = {kinds[static_cast<std::size_t>(crng.uniform_int(0, 3))], {}};
        }
        rec.ptype = ptype;
        rec.fireproof = fireproof_class(structure, ptype);
        properties.push_back(rec);

        for (int k = 0; k < n_images; ++k) {
            Rng irng(derive_seed(spec.seed, 0xF00DULL, static_cast<std::uint64_t>(p),
                                 static_cast<std::uint64_t>(k)));

            // label noise: each cue is independently replaced with
            // probability (1 - cue_strength)
            FacadeCues cues{year, structure, ptype};
            if (irng.next_unit() >= spec.cue_strength) {
                cues.year = irng.uniform_int(spec.year_min, spec.year_max);
            }
            if (irng.next_unit() >= spec.cue_strength) {
                cues.structure =
                    static_cast<BuildingStructure>(irng.uniform_int(0, kNumStructures - 1));
            }
            if (irng.next_unit() >= spec.cue_strength) {
                cues.ptype =
                    static_cast<PropertyType>(irng.uniform_int(0, kNumPropertyTypes - 1));
            }

            ImageRecord img_rec;
            img_rec.image_id = rec.property_id + "_i" + std::to_string(k);
            img_rec.property_id = rec.property_id;
            img_rec.path = "images/" + img_rec.image_id + ".png";
            if (spec.render_images) {
                const Image img = render_facade(cues, spec.image_size, irng.next_u64(),
                                                spec.year_min, spec.year_max);
                write_png(image_dir / (img_rec.image_id + ".png"), img);
            }
            images.push_back(std::move(img_rec));
        }
    }

    SynthResult res;
    res.property_manifest = out_dir / "properties.jsonl";
    res.image_manifest = out_dir / "images.jsonl";
    res.n_properties = properties.size();
    res.n_images = images.size();
    save_property_manifest(res.property_manifest, properties);
    save_image_manifest(res.image_manifest, images);
    return res;
}

}  // namespace facaderisk
