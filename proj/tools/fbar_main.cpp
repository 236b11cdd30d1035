// fbar: layered-resonator simulation and extraction tool.
// Subcommands: simulate, modes, sweep, fit, report. Thin shell over the
// library's C interface; all numbers cross the flag boundary in nm/GHz/um^2.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fbar/fbar.h"

namespace {

int rc_of(fbar_status st) { return st == FBAR_E_NUMERIC ? 2 : 1; }

void check(fbar_status st) {
    if (st == FBAR_OK) return;
    std::fprintf(stderr, "error: %s\n", fbar_last_error());
    std::exit(rc_of(st));
}

[[noreturn]] void usage_fail(const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    std::exit(1);
}

std::string g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// builtin catalog with file entries layered on top, so a user file may
// override one constant without restating the rest
fbar_catalog* load_catalog(const std::string& path) {
    fbar_catalog* base = nullptr;
    check(fbar_catalog_default(&base));
    if (path.empty()) return base;
    fbar_catalog* file = nullptr;
    check(fbar_catalog_load(path.c_str(), &file));
    for (size_t i = 0; i < fbar_catalog_size(file); ++i) {
        fbar_material m;
        check(fbar_catalog_at(file, i, &m));
        check(fbar_catalog_set(base, &m));
    }
    fbar_catalog_free(file);
    return base;
}

fbar_stack* load_stack(const fbar_catalog* cat, const std::string& stack_path,
                       const std::string& quartet) {
    if (stack_path.empty() == quartet.empty())
        usage_fail("exactly one of --stack or --quartet is required");
    fbar_stack* s = nullptr;
    if (!quartet.empty())
        check(fbar_stack_quartet(cat, quartet.c_str(), &s));
    else
        check(fbar_stack_load(stack_path.c_str(), cat, &s));
    return s;
}

fbar_k2_def k2_of(const std::string& name) {
    if (name == "fractional") return FBAR_K2_FRACTIONAL;
    if (name == "exact") return FBAR_K2_EXACT_PLATE;
    return FBAR_K2_DEFAULT;
}

struct GridArgs {
    double from_ghz = 5.0;
    double to_ghz = 70.0;
    int points = 6501;

    void attach(CLI::App* cmd) {
        cmd->add_option("--from", from_ghz, "sweep start, GHz")->capture_default_str();
        cmd->add_option("--to", to_ghz, "sweep stop, GHz")->capture_default_str();
        cmd->add_option("--points", points, "number of grid points")->capture_default_str();
    }
};

struct StackArgs {
    std::string stack_path;
    std::string quartet;
    std::string materials;

    void attach(CLI::App* cmd) {
        cmd->add_option("--stack", stack_path, "stack description file");
        cmd->add_option("--quartet", quartet, "builtin stack id (Al-Al, Pt-Al, Al-Pt, Pt-Pt)");
        cmd->add_option("--materials", materials, "material table overriding builtin entries");
    }
};

void cmd_simulate(const StackArgs& sa, const GridArgs& ga, const std::string& out) {
    fbar_catalog* cat = load_catalog(sa.materials);
    fbar_stack* stack = load_stack(cat, sa.stack_path, sa.quartet);
    fbar_spectrum* spec = nullptr;
    check(fbar_simulate(stack, ga.from_ghz * 1e9, ga.to_ghz * 1e9, ga.points, &spec));
    check(fbar_spectrum_save_csv(spec, out.c_str()));
    fbar_spectrum_free(spec);
    fbar_stack_free(stack);
    fbar_catalog_free(cat);
}

void cmd_modes(const StackArgs& sa, const GridArgs& ga, const std::string& k2name,
               const std::string& out) {
    fbar_catalog* cat = load_catalog(sa.materials);
    fbar_stack* stack = load_stack(cat, sa.stack_path, sa.quartet);
    fbar_spectrum* spec = nullptr;
    check(fbar_simulate(stack, ga.from_ghz * 1e9, ga.to_ghz * 1e9, ga.points, &spec));
    fbar_mode_report* report = nullptr;
    check(fbar_analyze_modes(stack, spec, k2_of(k2name), &report));
    char* table = nullptr;
    check(fbar_mode_report_table(report, &table));
    std::fputs(table, stdout);
    fbar_string_free(table);
    if (!out.empty()) check(fbar_mode_report_save_csv(report, out.c_str()));
    fbar_mode_report_free(report);
    fbar_spectrum_free(spec);
    fbar_stack_free(stack);
    fbar_catalog_free(cat);
}

std::vector<double> parse_range_nm(const std::string& spec) {
    auto fail = [&] { usage_fail("range must be start:stop:step in nm with step > 0: " + spec); };
    double start = 0, stop = 0, step = 0;
    char extra = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &start, &stop, &step, &extra) != 3) fail();
    if (!(step > 0) || !(start > 0)) fail();
    std::vector<double> out;
    for (double t = start; t <= stop + 1e-9; t += step) out.push_back(t);
    return out;
}

void cmd_sweep(const std::string& electrodes, const std::string& range, const std::string& piezo,
               double piezo_nm, double area_um2, const std::string& materials,
               const GridArgs& ga, const std::string& out) {
    std::vector<std::string> metals;
    {
        std::string cur;
        for (char c : electrodes + ",") {
            if (c == ',') {
                if (!cur.empty()) metals.push_back(cur);
                cur.clear();
            } else if (!std::isspace(static_cast<unsigned char>(c))) {
                cur += c;
            }
        }
    }
    std::vector<double> thicknesses = parse_range_nm(range);
    if (metals.empty() || thicknesses.empty()) usage_fail("sweep set is empty");

    fbar_catalog* cat = load_catalog(materials);
    std::string csv = "stack,t_electrode_nm,"
                      "s1_fs_hz,s1_fp_hz,s1_k2,"
                      "a2_fs_hz,a2_fp_hz,a2_k2,"
                      "s3_fs_hz,s3_fp_hz,s3_k2\n";
    for (const auto& top : metals) {
        for (const auto& bottom : metals) {
            for (double t_nm : thicknesses) {
                fbar_stack* stack = nullptr;
                check(fbar_stack_sandwich(cat, top.c_str(), bottom.c_str(), t_nm * 1e-9,
                                          piezo.c_str(), piezo_nm * 1e-9, area_um2 * 1e-12,
                                          &stack));
                fbar_spectrum* spec = nullptr;
                check(fbar_simulate(stack, ga.from_ghz * 1e9, ga.to_ghz * 1e9, ga.points, &spec));
                fbar_mode_report* report = nullptr;
                check(fbar_analyze_modes(stack, spec, FBAR_K2_DEFAULT, &report));

                std::string cell[3][3]; // S1, A2, S3 x fs, fp, k2
                for (size_t i = 0; i < fbar_mode_report_size(report); ++i) {
                    fbar_mode_row row;
                    check(fbar_mode_report_row(report, i, &row));
                    int slot = std::string(row.label) == "S1"   ? 0
                               : std::string(row.label) == "A2" ? 1
                               : std::string(row.label) == "S3" ? 2
                                                                : -1;
                    if (slot < 0 || !cell[slot][0].empty()) continue;
                    cell[slot][0] = g12(row.fs_hz);
                    cell[slot][1] = g12(row.fp_hz);
                    cell[slot][2] = g12(row.k2);
                }
                csv += top + "-" + bottom + "," + g12(t_nm);
                for (auto& mode : cell)
                    for (auto& field : mode) csv += "," + field;
                csv += "\n";

                fbar_mode_report_free(report);
                fbar_spectrum_free(spec);
                fbar_stack_free(stack);
            }
        }
    }
    fbar_catalog_free(cat);

    if (out.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        std::ofstream f(out);
        if (!f) usage_fail("cannot open output file: " + out);
        f << csv;
    }
}

void cmd_fit(const std::string& input, const std::string& topology, const std::string& model_out,
             const std::string& metrics_out) {
    fbar_network* net = nullptr;
    check(fbar_touchstone_load(input.c_str(), &net));
    fbar_topology topo = FBAR_TOPO_ONE_PORT;
    if (fbar_network_ports(net) == 2)
        topo = topology == "shunt" ? FBAR_TOPO_SHUNT_THRU : FBAR_TOPO_SERIES_THRU;
    fbar_spectrum* spec = nullptr;
    check(fbar_network_admittance(net, topo, &spec));
    fbar_network_free(net);

    fbar_fit_result* result = nullptr;
    check(fbar_mbvd_fit(spec, &result));
    fbar_spectrum_free(spec);

    fbar_mbvd* model = nullptr;
    check(fbar_fit_result_model(result, &model));
    if (!model_out.empty()) check(fbar_mbvd_save(model, model_out.c_str()));

    std::string csv = "branch,fs_hz,q,k2,fom\n";
    size_t n = fbar_mbvd_branch_count(model);
    for (size_t i = 0; i < n; ++i) {
        double fs = 0, q = 0, k2 = 0, f = 0;
        check(fbar_mbvd_metrics(model, i, &fs, &q, &k2));
        check(fbar_fom(k2, q, &f));
        std::printf("branch %zu: fs %.4f GHz  k2 %.2f%%  q %.1f  fom %.2f\n", i + 1, fs / 1e9,
                    k2 * 100, q, f);
        csv += g12(static_cast<double>(i + 1)) + "," + g12(fs) + "," + g12(q) + "," + g12(k2) +
               "," + g12(f) + "\n";
    }
    for (size_t i = 0; i < fbar_fit_result_warning_count(result); ++i) {
        char* w = nullptr;
        check(fbar_fit_result_warning(result, i, &w));
        std::fprintf(stderr, "warning: %s\n", w);
        fbar_string_free(w);
    }
    if (!metrics_out.empty()) {
        std::ofstream f(metrics_out);
        if (!f) usage_fail("cannot open output file: " + metrics_out);
        f << csv;
    }
    fbar_mbvd_free(model);
    fbar_fit_result_free(result);
}

void cmd_report(const std::vector<std::string>& surveys, const std::vector<std::string>& modes,
                const std::string& source, const std::string& technology, const std::string& out) {
    if (surveys.empty() && modes.empty())
        usage_fail("need at least one --survey or --modes input");
    fbar_survey* survey = nullptr;
    check(fbar_survey_new(&survey));
    for (const auto& path : surveys) check(fbar_survey_merge_csv(survey, path.c_str()));
    for (const auto& path : modes) {
        fbar_mode_report* report = nullptr;
        check(fbar_mode_report_load_csv(path.c_str(), &report));
        check(fbar_survey_add_report(survey, report, source.c_str(), technology.c_str()));
        fbar_mode_report_free(report);
    }
    char* table = nullptr;
    check(fbar_survey_table(survey, &table));
    std::fputs(table, stdout);
    fbar_string_free(table);
    if (!out.empty()) check(fbar_survey_save_csv(survey, out.c_str()));
    fbar_survey_free(survey);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thin-film bulk acoustic resonator simulation and extraction"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fbar_version());
    app.set_config("--config", "", "key/value file holding long-option defaults");
    app.get_config_formatter_base()->valueSeparator(' ')->comment('#');

    StackArgs sim_stack, modes_stack;
    GridArgs sim_grid, modes_grid, sweep_grid;
    std::string sim_out;
    auto* sim = app.add_subcommand("simulate", "write an admittance spectrum CSV for one stack");
    sim_stack.attach(sim);
    sim_grid.attach(sim);
    sim->add_option("-o,--output", sim_out, "spectrum CSV path")->required();
    sim->callback([&] { cmd_simulate(sim_stack, sim_grid, sim_out); });

    std::string modes_k2 = "default", modes_out;
    auto* modes = app.add_subcommand("modes", "simulate a stack and tabulate its resonances");
    modes_stack.attach(modes);
    modes_grid.attach(modes);
    modes->add_option("--k2", modes_k2, "coupling definition: default, fractional, exact")
        ->check(CLI::IsMember({"default", "fractional", "exact"}))
        ->capture_default_str();
    modes->add_option("-o,--output", modes_out, "mode report CSV path");
    modes->callback([&] { cmd_modes(modes_stack, modes_grid, modes_k2, modes_out); });

    std::string sweep_electrodes = "Al,Pt", sweep_range = "45:45:1";
    std::string sweep_piezo = "Sc0.3Al0.7N", sweep_materials, sweep_out;
    double sweep_piezo_nm = 85.0, sweep_area = 154.0;
    auto* sweep = app.add_subcommand("sweep", "tabulate resonances across electrode variants");
    sweep->add_option("--electrodes", sweep_electrodes, "comma-separated electrode metals")
        ->capture_default_str();
    sweep->add_option("--thickness", sweep_range, "electrode thickness start:stop:step, nm")
        ->capture_default_str();
    sweep->add_option("--piezo", sweep_piezo, "piezoelectric material")->capture_default_str();
    sweep->add_option("--piezo-nm", sweep_piezo_nm, "piezoelectric thickness, nm")
        ->capture_default_str();
    sweep->add_option("--area-um2", sweep_area, "device area, um^2")->capture_default_str();
    sweep->add_option("--materials", sweep_materials, "material table overriding builtin entries");
    sweep_grid.attach(sweep);
    sweep->add_option("-o,--output", sweep_out, "sweep CSV path (stdout when omitted)");
    sweep->callback([&] {
        cmd_sweep(sweep_electrodes, sweep_range, sweep_piezo, sweep_piezo_nm, sweep_area,
                  sweep_materials, sweep_grid, sweep_out);
    });

    std::string fit_input, fit_topology = "series", fit_model_out, fit_metrics_out;
    auto* fit = app.add_subcommand("fit", "fit an equivalent circuit to a measured S-parameter file");
    fit->add_option("-i,--input", fit_input, "Touchstone .s1p/.s2p file")->required();
    fit->add_option("--topology", fit_topology, "two-port embedding: series or shunt")
        ->check(CLI::IsMember({"series", "shunt"}))
        ->capture_default_str();
    fit->add_option("-o,--output", fit_model_out, "fitted model file path");
    fit->add_option("--metrics", fit_metrics_out, "per-branch metrics CSV path");
    fit->callback([&] { cmd_fit(fit_input, fit_topology, fit_model_out, fit_metrics_out); });

    std::vector<std::string> report_surveys, report_modes;
    std::string report_source = "this-work", report_technology = "ScAlN", report_out;
    auto* report = app.add_subcommand("report", "merge mode reports and survey tables");
    report->add_option("--survey", report_surveys, "survey CSV to merge (repeatable)");
    report->add_option("--modes", report_modes, "mode report CSV to fold in (repeatable)");
    report->add_option("--source", report_source, "label for --modes rows")->capture_default_str();
    report->add_option("--technology", report_technology, "technology for --modes rows")
        ->capture_default_str();
    report->add_option("-o,--output", report_out, "merged survey CSV path");
    report->callback([&] {
        cmd_report(report_surveys, report_modes, report_source, report_technology, report_out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    return 0;
}
