#include "core/stack.h"

#include <fstream>
#include <sstream>

#include "core/error.h"
#include "core/text.h"

namespace fbar {

int Stack::piezo_index() const {
    for (size_t i = 0; i < layers.size(); ++i)
        if (layers[i].piezo) return static_cast<int>(i);
    return -1;
}

const Layer& Stack::piezo() const {
    int i = piezo_index();
    if (i < 0) fail(Errc::invalid, "stack has no active piezo layer");
    return layers[i];
}

double Stack::total_thickness() const {
    double t = 0;
    for (const auto& l : layers) t += l.thickness;
    return t;
}

void validate_stack(const Stack& s) {
    if (s.layers.empty()) fail(Errc::invalid, "stack has no layers");
    if (!(s.area > 0)) fail(Errc::invalid, "stack area must be > 0");
    int piezo_count = 0;
    for (size_t i = 0; i < s.layers.size(); ++i) {
        const auto& l = s.layers[i];
        validate_material(l.mat, "layer " + std::to_string(i + 1) + " (" + l.mat.name + ")");
        if (!(l.thickness > 0))
            fail(Errc::invalid, "layer " + std::to_string(i + 1) + ": thickness must be > 0");
        if (l.piezo) {
            if (!(l.mat.e33 > 0))
                fail(Errc::invalid, "layer " + std::to_string(i + 1) +
                                        ": piezo layer needs e33 > 0 ('" + l.mat.name + "' has none)");
            ++piezo_count;
        }
    }
    if (piezo_count == 0) fail(Errc::invalid, "no active piezo layer");
    if (piezo_count > 1) fail(Errc::invalid, "multiple active piezo layers");
    if (s.total_thickness() >= 10e-6)
        fail(Errc::invalid, "total thickness exceeds the 10 um thin-film bound");
    for (const auto* term : {&s.bottom, &s.top}) {
        if (!term->free) {
            if (!term->mat) fail(Errc::invalid, "non-free termination needs a material");
            validate_material(*term->mat, "termination material " + term->mat->name);
        }
    }
}

Stack parse_stack_file(const std::string& path, const Catalog& cat) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open stack file '" + path + "'");
    return parse_stack_stream(in, path, cat);
}

// grammar, '#' comments:
//   area_um2 <value>
//   layer <material> <thickness_nm> [piezo]
//   termination top|bottom free|<material>
// layers bottom first; terminations default free
Stack parse_stack_stream(std::istream& in, const std::string& origin, const Catalog& cat) {
    Stack s;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        std::string body = strip_comment(line, '#');
        if (body.empty()) continue;
        auto tok = split_ws(body);
        const std::string& key = tok[0];
        if (key == "area_um2") {
            if (tok.size() != 2) fail(Errc::parse, where + ": expected 'area_um2 <value>'");
            s.area = parse_double(tok[1], where + " area") * 1e-12;
        } else if (key == "layer") {
            if (tok.size() != 3 && tok.size() != 4)
                fail(Errc::parse, where + ": expected 'layer <material> <thickness_nm> [piezo]'");
            Layer l;
            if (!cat.has(tok[1])) fail(Errc::parse, where + ": unknown material '" + tok[1] + "'");
            l.mat = cat.get(tok[1]);
            l.thickness = parse_double(tok[2], where + " thickness") * 1e-9;
            if (tok.size() == 4) {
                if (tok[3] != "piezo") fail(Errc::parse, where + ": unexpected token '" + tok[3] + "'");
                l.piezo = true;
            }
            s.layers.push_back(std::move(l));
        } else if (key == "termination") {
            if (tok.size() != 3) fail(Errc::parse, where + ": expected 'termination top|bottom free|<material>'");
            Termination t;
            if (tok[2] == "free") {
                t.free = true;
            } else {
                if (!cat.has(tok[2])) fail(Errc::parse, where + ": unknown material '" + tok[2] + "'");
                t.free = false;
                t.mat = cat.get(tok[2]);
            }
            if (tok[1] == "top") s.top = t;
            else if (tok[1] == "bottom") s.bottom = t;
            else fail(Errc::parse, where + ": termination side must be top or bottom");
        } else {
            fail(Errc::parse, where + ": unknown directive '" + key + "'");
        }
    }
    try {
        validate_stack(s);
    } catch (const Error& e) {
        fail(Errc::parse, origin + ": " + e.what());
    }
    return s;
}

void write_stack(const Stack& s, std::ostream& out) {
    out << "area_um2 " << fmt_g(s.area * 1e12) << "\n";
    for (const auto& l : s.layers) {
        out << "layer " << l.mat.name << " " << fmt_g(l.thickness * 1e9);
        if (l.piezo) out << " piezo";
        out << "\n";
    }
    for (auto [side, term] : {std::pair{"bottom", &s.bottom}, std::pair{"top", &s.top}}) {
        out << "termination " << side << " " << (term->free ? "free" : term->mat->name) << "\n";
    }
}

void write_stack_file(const Stack& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Errc::io, "cannot write stack file '" + path + "'");
    write_stack(s, out);
    if (!out.good()) fail(Errc::io, "write failed for '" + path + "'");
}

Stack sandwich_stack(const Catalog& cat, const std::string& top_metal, const std::string& bottom_metal,
                     double t_electrode, const std::string& piezo, double t_piezo, double area) {
    Stack s;
    s.area = area;
    Layer bot{cat.get(bottom_metal), t_electrode, false};
    Layer mid{cat.get(piezo), t_piezo, true};
    Layer top{cat.get(top_metal), t_electrode, false};
    s.layers = {bot, mid, top};
    validate_stack(s);
    return s;
}

Stack quartet_stack(const Catalog& cat, const std::string& id) {
    for (const char* q : kQuartetIds) {
        if (id == q) {
            auto dash = id.find('-');
            return sandwich_stack(cat, id.substr(0, dash), id.substr(dash + 1),
                                  45e-9, "Sc0.3Al0.7N", 85e-9, 154e-12);
        }
    }
    fail(Errc::invalid, "unknown quartet id '" + id + "' (expected Al-Al, Pt-Al, Al-Pt or Pt-Pt)");
}

std::array<Stack, 4> canonical_quartet(const Catalog& cat) {
    return {quartet_stack(cat, kQuartetIds[0]), quartet_stack(cat, kQuartetIds[1]),
            quartet_stack(cat, kQuartetIds[2]), quartet_stack(cat, kQuartetIds[3])};
}

} // namespace fbar
