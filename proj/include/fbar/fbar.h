/* C interface to the FBAR simulation and extraction library.
 *
 * Conventions: every function returns an fbar_status (FBAR_OK on success);
 * outputs are written through pointers. On failure fbar_last_error() carries
 * a message for the calling thread. Handles are opaque and owned by the
 * caller; release them with the matching *_free function. All quantities are
 * SI unless a name says otherwise.
 */
#ifndef FBAR_H
#define FBAR_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fbar_status {
    FBAR_OK = 0,
    FBAR_E_INVALID = 1,  /* bad argument or violated invariant */
    FBAR_E_PARSE = 2,    /* malformed input file */
    FBAR_E_IO = 3,       /* filesystem failure */
    FBAR_E_NUMERIC = 4,  /* numeric failure or no convergence */
    FBAR_E_NOTFOUND = 5, /* lookup miss */
} fbar_status;

const char* fbar_version(void);
/* message for the last failing call on this thread; empty string if none */
const char* fbar_last_error(void);
/* releases strings returned through char** outputs */
void fbar_string_free(char* s);

/* ---------- materials ---------- */

typedef struct fbar_catalog fbar_catalog;

typedef struct fbar_material {
    char name[64];
    double rho_kg_m3;
    double c33_pa;
    double e33_c_m2;
    double eps33_f_m;  /* absolute permittivity */
    double mech_q;     /* INFINITY = lossless */
} fbar_material;

typedef struct fbar_acoustics {
    double c_stiffened_pa;
    double velocity_m_s;
    double specific_impedance;
    double kt2;
} fbar_acoustics;

fbar_status fbar_catalog_default(fbar_catalog** out);
fbar_status fbar_catalog_load(const char* path, fbar_catalog** out);
void fbar_catalog_free(fbar_catalog* cat);
size_t fbar_catalog_size(const fbar_catalog* cat);
fbar_status fbar_catalog_get(const fbar_catalog* cat, const char* name, fbar_material* out);
fbar_status fbar_catalog_at(const fbar_catalog* cat, size_t index, fbar_material* out);
/* insert or replace; calibrated entries go through here */
fbar_status fbar_catalog_set(fbar_catalog* cat, const fbar_material* m);
fbar_status fbar_material_acoustics(const fbar_material* m, fbar_acoustics* out);

/* ---------- stacks ---------- */

typedef struct fbar_stack fbar_stack;

typedef struct fbar_layer_info {
    char material[64];
    double thickness_m;
    int is_piezo;
} fbar_layer_info;

fbar_status fbar_stack_load(const char* path, const fbar_catalog* cat, fbar_stack** out);
fbar_status fbar_stack_save(const fbar_stack* s, const char* path);
void fbar_stack_free(fbar_stack* s);
/* id is "<top>-<bottom>" over {Al, Pt}: Al-Al, Pt-Al, Al-Pt, Pt-Pt */
fbar_status fbar_stack_quartet(const fbar_catalog* cat, const char* id, fbar_stack** out);
/* electrode/piezo/electrode build for parameter sweeps */
fbar_status fbar_stack_sandwich(const fbar_catalog* cat, const char* top_metal,
                                const char* bottom_metal, double t_electrode_m,
                                const char* piezo, double t_piezo_m, double area_m2,
                                fbar_stack** out);
size_t fbar_stack_layer_count(const fbar_stack* s);
fbar_status fbar_stack_layer(const fbar_stack* s, size_t index, fbar_layer_info* out);
double fbar_stack_area(const fbar_stack* s);

/* ---------- spectra ---------- */

typedef struct fbar_spectrum fbar_spectrum;

/* Mason-model admittance over a linear grid; f in Hz */
fbar_status fbar_simulate(const fbar_stack* s, double f_start, double f_stop, int n_points,
                          fbar_spectrum** out);
void fbar_spectrum_free(fbar_spectrum* s);
size_t fbar_spectrum_size(const fbar_spectrum* s);
fbar_status fbar_spectrum_point(const fbar_spectrum* s, size_t index, double* f_hz, double* re_y,
                                double* im_y);
int fbar_spectrum_is_measured(const fbar_spectrum* s);
fbar_status fbar_spectrum_save_csv(const fbar_spectrum* s, const char* path);
fbar_status fbar_spectrum_load_csv(const char* path, fbar_spectrum** out);

/* stress amplitude through the thickness at f; arrays are freed together
 * with fbar_buffer_free on each pointer */
fbar_status fbar_stress_profile(const fbar_stack* s, double f_hz, int min_samples_per_layer,
                                double** z_m, double** re_tau, double** im_tau, size_t* n);
void fbar_buffer_free(double* buf);

/* ---------- mode analysis ---------- */

typedef struct fbar_mode_report fbar_mode_report;

typedef enum fbar_k2_def {
    FBAR_K2_DEFAULT = 0,     /* (pi^2/8) (fp^2 - fs^2) / fp^2 */
    FBAR_K2_FRACTIONAL = 1,  /* (pi^2/4) (fp - fs) / fp */
    FBAR_K2_EXACT_PLATE = 2, /* (pi fs / 2fp) cot(pi fs / 2fp) */
} fbar_k2_def;

typedef struct fbar_mode_row {
    char label[8];
    double fs_hz;
    double fp_hz;
    double k2;
    double q;          /* 0 when absent */
    int has_q;
    char q_source[8];  /* "bode", "mbvd" or "" */
    double fom;        /* 0 when absent */
    int has_fom;
    int warn;          /* ambiguous classification */
} fbar_mode_row;

/* locate resonances in the spectrum, classify each against the stack's
 * stress profile, and attach k2 / Q / FoM */
fbar_status fbar_analyze_modes(const fbar_stack* s, const fbar_spectrum* spec, fbar_k2_def k2def,
                               fbar_mode_report** out);
void fbar_mode_report_free(fbar_mode_report* r);
size_t fbar_mode_report_size(const fbar_mode_report* r);
fbar_status fbar_mode_report_row(const fbar_mode_report* r, size_t index, fbar_mode_row* out);
fbar_status fbar_mode_report_save_csv(const fbar_mode_report* r, const char* path);
fbar_status fbar_mode_report_load_csv(const char* path, fbar_mode_report** out);
/* aligned text table; free with fbar_string_free */
fbar_status fbar_mode_report_table(const fbar_mode_report* r, char** out);

fbar_status fbar_coupling(double fs_hz, double fp_hz, fbar_k2_def k2def, double* out);
fbar_status fbar_q_bode(const fbar_spectrum* s, double f0_hz, double* out);
fbar_status fbar_fom(double k2, double q, double* out);

/* ---------- mBVD circuit ---------- */

typedef struct fbar_mbvd fbar_mbvd;
typedef struct fbar_fit_result fbar_fit_result;

fbar_status fbar_mbvd_new(double rs_ohm, double ls_h, double c0_f, double r0_ohm, fbar_mbvd** out);
fbar_status fbar_mbvd_add_branch(fbar_mbvd* m, double rm_ohm, double lm_h, double cm_f);
void fbar_mbvd_free(fbar_mbvd* m);
fbar_status fbar_mbvd_em(const fbar_mbvd* m, double* rs_ohm, double* ls_h, double* c0_f,
                         double* r0_ohm);
size_t fbar_mbvd_branch_count(const fbar_mbvd* m);
fbar_status fbar_mbvd_branch(const fbar_mbvd* m, size_t index, double* rm_ohm, double* lm_h,
                             double* cm_f);
/* per-branch fs / Q / k2 from the circuit values */
fbar_status fbar_mbvd_metrics(const fbar_mbvd* m, size_t index, double* fs_hz, double* q,
                              double* k2);
fbar_status fbar_mbvd_evaluate(const fbar_mbvd* m, double f_start, double f_stop, int n_points,
                               fbar_spectrum** out);
fbar_status fbar_mbvd_save(const fbar_mbvd* m, const char* path);
fbar_status fbar_mbvd_load(const char* path, fbar_mbvd** out);

/* two-stage fit of the circuit to a spectrum */
fbar_status fbar_mbvd_fit(const fbar_spectrum* s, fbar_fit_result** out);
void fbar_fit_result_free(fbar_fit_result* r);
fbar_status fbar_fit_result_model(const fbar_fit_result* r, fbar_mbvd** out);
double fbar_fit_result_residual(const fbar_fit_result* r);
int fbar_fit_result_converged(const fbar_fit_result* r);
size_t fbar_fit_result_warning_count(const fbar_fit_result* r);
fbar_status fbar_fit_result_warning(const fbar_fit_result* r, size_t index, char** out);

/* ---------- touchstone ---------- */

typedef struct fbar_network fbar_network;

typedef enum fbar_topology {
    FBAR_TOPO_ONE_PORT = 0,
    FBAR_TOPO_SERIES_THRU = 1,
    FBAR_TOPO_SHUNT_THRU = 2,
} fbar_topology;

fbar_status fbar_touchstone_load(const char* path, fbar_network** out);
void fbar_network_free(fbar_network* n);
int fbar_network_ports(const fbar_network* n);
size_t fbar_network_size(const fbar_network* n);
double fbar_network_z0(const fbar_network* n);
fbar_status fbar_network_admittance(const fbar_network* n, fbar_topology topo,
                                    fbar_spectrum** out);

/* ---------- survey ---------- */

typedef struct fbar_survey fbar_survey;

typedef struct fbar_survey_row {
    char source[64];
    char technology[32];
    double freq_hz;
    double k2;
    double q;
    double fom;
    int below_10ghz;
    int fom_recomputed;
} fbar_survey_row;

fbar_status fbar_survey_new(fbar_survey** out);
void fbar_survey_free(fbar_survey* s);
fbar_status fbar_survey_add(fbar_survey* s, const char* source, const char* technology,
                            double freq_hz, double k2, double q, const double* fom_opt);
fbar_status fbar_survey_add_report(fbar_survey* s, const fbar_mode_report* r, const char* source,
                                   const char* technology);
/* merge a literature CSV; repeated merges of the same file are idempotent */
fbar_status fbar_survey_merge_csv(fbar_survey* s, const char* path);
size_t fbar_survey_size(const fbar_survey* s);
fbar_status fbar_survey_row_at(const fbar_survey* s, size_t index, fbar_survey_row* out);
fbar_status fbar_survey_save_csv(const fbar_survey* s, const char* path);
fbar_status fbar_survey_table(const fbar_survey* s, char** out);

#ifdef __cplusplus
}
#endif

#endif /* FBAR_H */
