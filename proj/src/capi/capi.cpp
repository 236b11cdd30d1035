#include "fbar/fbar.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "core/error.h"
#include "core/mason.h"
#include "core/materials.h"
#include "core/mbvd.h"
#include "core/modes.h"
#include "core/spectrum.h"
#include "core/stack.h"
#include "core/survey.h"
#include "core/touchstone.h"

struct fbar_catalog { fbar::Catalog cat; };
struct fbar_stack { fbar::Stack s; };
struct fbar_spectrum { fbar::Spectrum s; };
struct fbar_mode_report { std::vector<fbar::ModeRow> rows; };
struct fbar_mbvd { fbar::Mbvd m; };
struct fbar_fit_result { fbar::FitResult r; };
struct fbar_network { fbar::Network n; };
struct fbar_survey { std::vector<fbar::SurveyEntry> entries; };

namespace {

thread_local std::string g_last_error;

fbar_status code_of(fbar::Errc c) {
    switch (c) {
        case fbar::Errc::invalid: return FBAR_E_INVALID;
        case fbar::Errc::parse: return FBAR_E_PARSE;
        case fbar::Errc::io: return FBAR_E_IO;
        case fbar::Errc::numeric: return FBAR_E_NUMERIC;
        case fbar::Errc::not_found: return FBAR_E_NOTFOUND;
    }
    return FBAR_E_INVALID;
}

template <typename F>
fbar_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return FBAR_OK;
    } catch (const fbar::Error& e) {
        g_last_error = e.what();
        return code_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return FBAR_E_INVALID;
    }
}

fbar_status need(bool ok, const char* what) {
    if (ok) return FBAR_OK;
    g_last_error = std::string("null or invalid argument: ") + what;
    return FBAR_E_INVALID;
}

void copy_name(char* dst, size_t cap, const std::string& src) {
    std::snprintf(dst, cap, "%s", src.c_str());
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

fbar::Material to_core(const fbar_material& m) {
    fbar::Material out;
    out.name = m.name;
    out.rho = m.rho_kg_m3;
    out.c33 = m.c33_pa;
    out.e33 = m.e33_c_m2;
    out.eps33 = m.eps33_f_m;
    out.mech_q = m.mech_q;
    return out;
}

fbar_material from_core(const fbar::Material& m) {
    fbar_material out{};
    copy_name(out.name, sizeof out.name, m.name);
    out.rho_kg_m3 = m.rho;
    out.c33_pa = m.c33;
    out.e33_c_m2 = m.e33;
    out.eps33_f_m = m.eps33;
    out.mech_q = m.mech_q;
    return out;
}

fbar::K2Def k2_of(fbar_k2_def d) {
    switch (d) {
        case FBAR_K2_FRACTIONAL: return fbar::K2Def::fractional;
        case FBAR_K2_EXACT_PLATE: return fbar::K2Def::exact_plate;
        default: return fbar::K2Def::fractional_sq;
    }
}

} // namespace

extern "C" {

const char* fbar_version(void) { return "1.0.0"; }

const char* fbar_last_error(void) { return g_last_error.c_str(); }

void fbar_string_free(char* s) { delete[] s; }

/* ---------- materials ---------- */

fbar_status fbar_catalog_default(fbar_catalog** out) {
    if (auto rc = need(out, "out")) return rc;
    return guarded([&] { *out = new fbar_catalog{fbar::Catalog::builtin()}; });
}

fbar_status fbar_catalog_load(const char* path, fbar_catalog** out) {
    if (auto rc = need(path && out, "path/out")) return rc;
    return guarded([&] { *out = new fbar_catalog{fbar::Catalog::load_file(path)}; });
}

void fbar_catalog_free(fbar_catalog* cat) { delete cat; }

size_t fbar_catalog_size(const fbar_catalog* cat) { return cat ? cat->cat.size() : 0; }

fbar_status fbar_catalog_get(const fbar_catalog* cat, const char* name, fbar_material* out) {
    if (auto rc = need(cat && name && out, "catalog/name/out")) return rc;
    return guarded([&] { *out = from_core(cat->cat.get(name)); });
}

fbar_status fbar_catalog_at(const fbar_catalog* cat, size_t index, fbar_material* out) {
    if (auto rc = need(cat && out, "catalog/out")) return rc;
    return guarded([&] {
        if (index >= cat->cat.size()) fbar::fail(fbar::Errc::invalid, "catalog index out of range");
        *out = from_core(cat->cat.entries()[index]);
    });
}

fbar_status fbar_catalog_set(fbar_catalog* cat, const fbar_material* m) {
    if (auto rc = need(cat && m, "catalog/material")) return rc;
    return guarded([&] {
        fbar::Material core = to_core(*m);
        fbar::validate_material(core, core.name);
        cat->cat.upsert(core);
    });
}

fbar_status fbar_material_acoustics(const fbar_material* m, fbar_acoustics* out) {
    if (auto rc = need(m && out, "material/out")) return rc;
    return guarded([&] {
        fbar::Material core = to_core(*m);
        fbar::validate_material(core, core.name);
        auto a = fbar::derive_acoustics(core);
        out->c_stiffened_pa = a.c_stiffened;
        out->velocity_m_s = a.velocity;
        out->specific_impedance = a.specific_impedance;
        out->kt2 = a.kt2;
    });
}

/* ---------- stacks ---------- */

fbar_status fbar_stack_load(const char* path, const fbar_catalog* cat, fbar_stack** out) {
    if (auto rc = need(path && cat && out, "path/catalog/out")) return rc;
    return guarded([&] { *out = new fbar_stack{fbar::parse_stack_file(path, cat->cat)}; });
}

fbar_status fbar_stack_save(const fbar_stack* s, const char* path) {
    if (auto rc = need(s && path, "stack/path")) return rc;
    return guarded([&] { fbar::write_stack_file(s->s, path); });
}

void fbar_stack_free(fbar_stack* s) { delete s; }

fbar_status fbar_stack_quartet(const fbar_catalog* cat, const char* id, fbar_stack** out) {
    if (auto rc = need(cat && id && out, "catalog/id/out")) return rc;
    return guarded([&] { *out = new fbar_stack{fbar::quartet_stack(cat->cat, id)}; });
}

fbar_status fbar_stack_sandwich(const fbar_catalog* cat, const char* top_metal,
                                const char* bottom_metal, double t_electrode_m, const char* piezo,
                                double t_piezo_m, double area_m2, fbar_stack** out) {
    if (auto rc = need(cat && top_metal && bottom_metal && piezo && out, "arguments")) return rc;
    return guarded([&] {
        *out = new fbar_stack{fbar::sandwich_stack(cat->cat, top_metal, bottom_metal, t_electrode_m,
                                                   piezo, t_piezo_m, area_m2)};
    });
}

size_t fbar_stack_layer_count(const fbar_stack* s) { return s ? s->s.layers.size() : 0; }

fbar_status fbar_stack_layer(const fbar_stack* s, size_t index, fbar_layer_info* out) {
    if (auto rc = need(s && out, "stack/out")) return rc;
    return guarded([&] {
        if (index >= s->s.layers.size()) fbar::fail(fbar::Errc::invalid, "layer index out of range");
        const auto& l = s->s.layers[index];
        copy_name(out->material, sizeof out->material, l.mat.name);
        out->thickness_m = l.thickness;
        out->is_piezo = l.piezo ? 1 : 0;
    });
}

double fbar_stack_area(const fbar_stack* s) { return s ? s->s.area : 0; }

/* ---------- spectra ---------- */

fbar_status fbar_simulate(const fbar_stack* s, double f_start, double f_stop, int n_points,
                          fbar_spectrum** out) {
    if (auto rc = need(s && out, "stack/out")) return rc;
    return guarded([&] {
        fbar::Grid g{f_start, f_stop, n_points};
        *out = new fbar_spectrum{fbar::input_admittance(s->s, g)};
    });
}

void fbar_spectrum_free(fbar_spectrum* s) { delete s; }

size_t fbar_spectrum_size(const fbar_spectrum* s) { return s ? s->s.size() : 0; }

fbar_status fbar_spectrum_point(const fbar_spectrum* s, size_t index, double* f_hz, double* re_y,
                                double* im_y) {
    if (auto rc = need(s && f_hz && re_y && im_y, "spectrum/outputs")) return rc;
    return guarded([&] {
        if (index >= s->s.size()) fbar::fail(fbar::Errc::invalid, "spectrum index out of range");
        *f_hz = s->s.f[index];
        *re_y = s->s.y[index].real();
        *im_y = s->s.y[index].imag();
    });
}

int fbar_spectrum_is_measured(const fbar_spectrum* s) {
    return s && s->s.provenance == fbar::Provenance::measured ? 1 : 0;
}

fbar_status fbar_spectrum_save_csv(const fbar_spectrum* s, const char* path) {
    if (auto rc = need(s && path, "spectrum/path")) return rc;
    return guarded([&] { fbar::write_spectrum_csv_file(s->s, path); });
}

fbar_status fbar_spectrum_load_csv(const char* path, fbar_spectrum** out) {
    if (auto rc = need(path && out, "path/out")) return rc;
    return guarded([&] { *out = new fbar_spectrum{fbar::read_spectrum_csv_file(path)}; });
}

fbar_status fbar_stress_profile(const fbar_stack* s, double f_hz, int min_samples_per_layer,
                                double** z_m, double** re_tau, double** im_tau, size_t* n) {
    if (auto rc = need(s && z_m && re_tau && im_tau && n, "stack/outputs")) return rc;
    return guarded([&] {
        auto prof = fbar::stress_profile(s->s, f_hz, min_samples_per_layer);
        size_t count = prof.z.size();
        double* z = new double[count];
        double* re = new double[count];
        double* im = new double[count];
        for (size_t i = 0; i < count; ++i) {
            z[i] = prof.z[i];
            re[i] = prof.tau[i].real();
            im[i] = prof.tau[i].imag();
        }
        *z_m = z;
        *re_tau = re;
        *im_tau = im;
        *n = count;
    });
}

void fbar_buffer_free(double* buf) { delete[] buf; }

/* ---------- mode analysis ---------- */

namespace {

fbar_mode_row row_from(const fbar::ModeRow& r) {
    fbar_mode_row out{};
    copy_name(out.label, sizeof out.label, r.label);
    out.fs_hz = r.fs;
    out.fp_hz = r.fp;
    out.k2 = r.k2;
    out.has_q = r.q.has_value();
    out.q = r.q.value_or(0);
    copy_name(out.q_source, sizeof out.q_source, r.q_source);
    out.has_fom = r.fom.has_value();
    out.fom = r.fom.value_or(0);
    out.warn = r.warn ? 1 : 0;
    return out;
}

} // namespace

fbar_status fbar_analyze_modes(const fbar_stack* s, const fbar_spectrum* spec, fbar_k2_def k2def,
                               fbar_mode_report** out) {
    if (auto rc = need(s && spec && out, "stack/spectrum/out")) return rc;
    return guarded([&] {
        *out = new fbar_mode_report{fbar::analyze_modes(s->s, spec->s, k2_of(k2def))};
    });
}

void fbar_mode_report_free(fbar_mode_report* r) { delete r; }

size_t fbar_mode_report_size(const fbar_mode_report* r) { return r ? r->rows.size() : 0; }

fbar_status fbar_mode_report_row(const fbar_mode_report* r, size_t index, fbar_mode_row* out) {
    if (auto rc = need(r && out, "report/out")) return rc;
    return guarded([&] {
        if (index >= r->rows.size()) fbar::fail(fbar::Errc::invalid, "report index out of range");
        *out = row_from(r->rows[index]);
    });
}

fbar_status fbar_mode_report_save_csv(const fbar_mode_report* r, const char* path) {
    if (auto rc = need(r && path, "report/path")) return rc;
    return guarded([&] { fbar::write_mode_csv_file(r->rows, path); });
}

fbar_status fbar_mode_report_load_csv(const char* path, fbar_mode_report** out) {
    if (auto rc = need(path && out, "path/out")) return rc;
    return guarded([&] { *out = new fbar_mode_report{fbar::read_mode_csv_file(path)}; });
}

fbar_status fbar_mode_report_table(const fbar_mode_report* r, char** out) {
    if (auto rc = need(r && out, "report/out")) return rc;
    return guarded([&] { *out = dup_string(fbar::format_mode_table(r->rows)); });
}

fbar_status fbar_coupling(double fs_hz, double fp_hz, fbar_k2_def k2def, double* out) {
    if (auto rc = need(out, "out")) return rc;
    return guarded([&] { *out = fbar::coupling(fs_hz, fp_hz, k2_of(k2def)); });
}

fbar_status fbar_q_bode(const fbar_spectrum* s, double f0_hz, double* out) {
    if (auto rc = need(s && out, "spectrum/out")) return rc;
    return guarded([&] { *out = fbar::q_bode(s->s, f0_hz); });
}

fbar_status fbar_fom(double k2, double q, double* out) {
    if (auto rc = need(out, "out")) return rc;
    return guarded([&] { *out = fbar::fom(k2, q); });
}

/* ---------- mBVD ---------- */

fbar_status fbar_mbvd_new(double rs_ohm, double ls_h, double c0_f, double r0_ohm, fbar_mbvd** out) {
    if (auto rc = need(out, "out")) return rc;
    return guarded([&] {
        fbar::Mbvd m;
        m.rs = rs_ohm;
        m.ls = ls_h;
        m.c0 = c0_f;
        m.r0 = r0_ohm;
        fbar::validate_mbvd(m);
        *out = new fbar_mbvd{std::move(m)};
    });
}

fbar_status fbar_mbvd_add_branch(fbar_mbvd* m, double rm_ohm, double lm_h, double cm_f) {
    if (auto rc = need(m, "model")) return rc;
    return guarded([&] {
        m->m.branches.push_back({rm_ohm, lm_h, cm_f});
        try {
            fbar::validate_mbvd(m->m);
        } catch (...) {
            m->m.branches.pop_back();
            throw;
        }
    });
}

void fbar_mbvd_free(fbar_mbvd* m) { delete m; }

fbar_status fbar_mbvd_em(const fbar_mbvd* m, double* rs_ohm, double* ls_h, double* c0_f,
                         double* r0_ohm) {
    if (auto rc = need(m && rs_ohm && ls_h && c0_f && r0_ohm, "model/outputs")) return rc;
    *rs_ohm = m->m.rs;
    *ls_h = m->m.ls;
    *c0_f = m->m.c0;
    *r0_ohm = m->m.r0;
    g_last_error.clear();
    return FBAR_OK;
}

size_t fbar_mbvd_branch_count(const fbar_mbvd* m) { return m ? m->m.branches.size() : 0; }

fbar_status fbar_mbvd_branch(const fbar_mbvd* m, size_t index, double* rm_ohm, double* lm_h,
                             double* cm_f) {
    if (auto rc = need(m && rm_ohm && lm_h && cm_f, "model/outputs")) return rc;
    return guarded([&] {
        if (index >= m->m.branches.size()) fbar::fail(fbar::Errc::invalid, "branch index out of range");
        const auto& b = m->m.branches[index];
        *rm_ohm = b.rm;
        *lm_h = b.lm;
        *cm_f = b.cm;
    });
}

fbar_status fbar_mbvd_metrics(const fbar_mbvd* m, size_t index, double* fs_hz, double* q,
                              double* k2) {
    if (auto rc = need(m && fs_hz && q && k2, "model/outputs")) return rc;
    return guarded([&] {
        auto metrics = fbar::derive_metrics(m->m);
        if (index >= metrics.size()) fbar::fail(fbar::Errc::invalid, "branch index out of range");
        *fs_hz = metrics[index].fs;
        *q = metrics[index].q;
        *k2 = metrics[index].k2;
    });
}

fbar_status fbar_mbvd_evaluate(const fbar_mbvd* m, double f_start, double f_stop, int n_points,
                               fbar_spectrum** out) {
    if (auto rc = need(m && out, "model/out")) return rc;
    return guarded([&] {
        fbar::Grid g{f_start, f_stop, n_points};
        *out = new fbar_spectrum{fbar::evaluate(m->m, g.points())};
    });
}

fbar_status fbar_mbvd_save(const fbar_mbvd* m, const char* path) {
    if (auto rc = need(m && path, "model/path")) return rc;
    return guarded([&] { fbar::write_mbvd_file(m->m, path); });
}

fbar_status fbar_mbvd_load(const char* path, fbar_mbvd** out) {
    if (auto rc = need(path && out, "path/out")) return rc;
    return guarded([&] { *out = new fbar_mbvd{fbar::read_mbvd_file(path)}; });
}

fbar_status fbar_mbvd_fit(const fbar_spectrum* s, fbar_fit_result** out) {
    if (auto rc = need(s && out, "spectrum/out")) return rc;
    return guarded([&] { *out = new fbar_fit_result{fbar::fit_mbvd(s->s)}; });
}

void fbar_fit_result_free(fbar_fit_result* r) { delete r; }

fbar_status fbar_fit_result_model(const fbar_fit_result* r, fbar_mbvd** out) {
    if (auto rc = need(r && out, "result/out")) return rc;
    return guarded([&] { *out = new fbar_mbvd{r->r.model}; });
}

double fbar_fit_result_residual(const fbar_fit_result* r) { return r ? r->r.residual : 0; }

int fbar_fit_result_converged(const fbar_fit_result* r) {
    if (!r) return 0;
    for (const auto& st : r->r.stages)
        if (!st.converged) return 0;
    return 1;
}

size_t fbar_fit_result_warning_count(const fbar_fit_result* r) {
    return r ? r->r.warnings.size() : 0;
}

fbar_status fbar_fit_result_warning(const fbar_fit_result* r, size_t index, char** out) {
    if (auto rc = need(r && out, "result/out")) return rc;
    return guarded([&] {
        if (index >= r->r.warnings.size())
            fbar::fail(fbar::Errc::invalid, "warning index out of range");
        *out = dup_string(r->r.warnings[index]);
    });
}

/* ---------- touchstone ---------- */

fbar_status fbar_touchstone_load(const char* path, fbar_network** out) {
    if (auto rc = need(path && out, "path/out")) return rc;
    return guarded([&] { *out = new fbar_network{fbar::read_touchstone_file(path)}; });
}

void fbar_network_free(fbar_network* n) { delete n; }

int fbar_network_ports(const fbar_network* n) { return n ? n->n.ports : 0; }

size_t fbar_network_size(const fbar_network* n) { return n ? n->n.f.size() : 0; }

double fbar_network_z0(const fbar_network* n) { return n ? n->n.z0 : 0; }

fbar_status fbar_network_admittance(const fbar_network* n, fbar_topology topo,
                                    fbar_spectrum** out) {
    if (auto rc = need(n && out, "network/out")) return rc;
    return guarded([&] {
        fbar::Topology t = topo == FBAR_TOPO_ONE_PORT     ? fbar::Topology::one_port
                           : topo == FBAR_TOPO_SERIES_THRU ? fbar::Topology::series_thru
                                                           : fbar::Topology::shunt_thru;
        *out = new fbar_spectrum{fbar::to_device_admittance(n->n, t)};
    });
}

/* ---------- survey ---------- */

fbar_status fbar_survey_new(fbar_survey** out) {
    if (auto rc = need(out, "out")) return rc;
    return guarded([&] { *out = new fbar_survey{}; });
}

void fbar_survey_free(fbar_survey* s) { delete s; }

fbar_status fbar_survey_add(fbar_survey* s, const char* source, const char* technology,
                            double freq_hz, double k2, double q, const double* fom_opt) {
    if (auto rc = need(s && source && technology, "survey/labels")) return rc;
    return guarded([&] {
        std::vector<fbar::SurveyEntry> lit(1);
        auto& e = lit[0];
        e.source = source;
        e.technology = technology;
        e.freq = freq_hz;
        e.k2 = k2;
        e.q = q;
        if (!(e.freq > 0)) fbar::fail(fbar::Errc::invalid, "frequency must be > 0");
        if (e.k2 < 0 || e.q < 0) fbar::fail(fbar::Errc::invalid, "k2 and q must be >= 0");
        double product = e.k2 * e.q;
        if (fom_opt) {
            e.fom = *fom_opt;
            double ref = std::max(std::abs(product), 1e-30);
            if (std::abs(e.fom - product) > 0.01 * ref) {
                e.fom = product;
                e.fom_recomputed = true;
            }
        } else {
            e.fom = product;
        }
        e.below_10ghz = e.freq < 10e9;
        s->entries = fbar::merge_survey(std::move(s->entries), lit);
    });
}

fbar_status fbar_survey_add_report(fbar_survey* s, const fbar_mode_report* r, const char* source,
                                   const char* technology) {
    if (auto rc = need(s && r && source && technology, "survey/report/labels")) return rc;
    return guarded([&] {
        auto lit = fbar::entries_from_modes(r->rows, source, technology);
        s->entries = fbar::merge_survey(std::move(s->entries), lit);
    });
}

fbar_status fbar_survey_merge_csv(fbar_survey* s, const char* path) {
    if (auto rc = need(s && path, "survey/path")) return rc;
    return guarded([&] {
        auto lit = fbar::read_survey_csv_file(path);
        s->entries = fbar::merge_survey(std::move(s->entries), lit);
    });
}

size_t fbar_survey_size(const fbar_survey* s) { return s ? s->entries.size() : 0; }

fbar_status fbar_survey_row_at(const fbar_survey* s, size_t index, fbar_survey_row* out) {
    if (auto rc = need(s && out, "survey/out")) return rc;
    return guarded([&] {
        if (index >= s->entries.size()) fbar::fail(fbar::Errc::invalid, "survey index out of range");
        const auto& e = s->entries[index];
        copy_name(out->source, sizeof out->source, e.source);
        copy_name(out->technology, sizeof out->technology, e.technology);
        out->freq_hz = e.freq;
        out->k2 = e.k2;
        out->q = e.q;
        out->fom = e.fom;
        out->below_10ghz = e.below_10ghz ? 1 : 0;
        out->fom_recomputed = e.fom_recomputed ? 1 : 0;
    });
}

fbar_status fbar_survey_save_csv(const fbar_survey* s, const char* path) {
    if (auto rc = need(s && path, "survey/path")) return rc;
    return guarded([&] { fbar::write_survey_csv_file(s->entries, path); });
}

fbar_status fbar_survey_table(const fbar_survey* s, char** out) {
    if (auto rc = need(s && out, "survey/out")) return rc;
    return guarded([&] { *out = dup_string(fbar::format_survey_table(s->entries)); });
}

} // extern "C"
