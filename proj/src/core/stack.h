#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "core/materials.h"

namespace fbar {

struct Layer {
    Material mat;       // copied in: stacks are self-contained value objects
    double thickness = 0; // m
    bool piezo = false;
};

// acoustic load on a stack face: free (zero impedance) or semi-infinite material
struct Termination {
    bool free = true;
    std::optional<Material> mat;
};

struct Stack {
    std::vector<Layer> layers; // bottom first
    double area = 154e-12;     // m^2, default 14x11 um
    Termination bottom, top;

    int piezo_index() const;
    const Layer& piezo() const;
    double total_thickness() const;
};

void validate_stack(const Stack& s);

Stack parse_stack_file(const std::string& path, const Catalog& cat);
Stack parse_stack_stream(std::istream& in, const std::string& origin, const Catalog& cat);
void write_stack(const Stack& s, std::ostream& out);
void write_stack_file(const Stack& s, const std::string& path);

// electrode/piezo/electrode sandwich, free-free
Stack sandwich_stack(const Catalog& cat, const std::string& top_metal, const std::string& bottom_metal,
                     double t_electrode, const std::string& piezo, double t_piezo, double area);

// the four canonical 45/85/45 nm electrode variants, 154 um^2, free-free
inline constexpr std::array<const char*, 4> kQuartetIds = {"Al-Al", "Pt-Al", "Al-Pt", "Pt-Pt"};
Stack quartet_stack(const Catalog& cat, const std::string& id); // id = "<top>-<bottom>"
std::array<Stack, 4> canonical_quartet(const Catalog& cat);

} // namespace fbar
