#ifndef AGGDIFF_H
#define AGGDIFF_H

/* C interface to the aggregation-diffusion laboratory.
 *
 * All functions return an agd_status (or NULL for constructors on failure);
 * agd_last_error() describes the most recent failure on the calling thread.
 * Handles are opaque and must be released with the matching _free call.
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    AGD_OK = 0,
    AGD_ERROR = 1,         /* parse / I/O / solver failure */
    AGD_INADMISSIBLE = 2,  /* kernel fails Definition-level admissibility */
    AGD_INDETERMINATE = 3, /* tail fits have no usable trend */
    AGD_BLOWUP = 4,        /* run ended in numerical blow-up */
    AGD_DT_FLOOR = 5,      /* adaptive time step collapsed */
    AGD_PROTOCOL = 6       /* sweep outcomes violated the dichotomy protocol */
} agd_status;

const char* agd_last_error(void);

/* ------------------------------------------------------------------ */
/* High-level commands: read a config file, write artifacts to out_dir */
/* (created fresh; existing directories are refused). Return values    */
/* follow the agd_status table above.                                  */

int agd_cmd_check_kernel(const char* config_path, const char* out_dir, int verbose);
int agd_cmd_classify(const char* config_path, const char* out_dir, int verbose);
int agd_cmd_simulate(const char* config_path, const char* out_dir, int verbose);
int agd_cmd_sweep(const char* config_path, const char* out_dir, int verbose);
int agd_cmd_virial(const char* config_path, const char* out_dir, int verbose);
int agd_cmd_barenblatt(const char* config_path, const char* out_dir, int verbose);

/* ------------------------------------------------------------------ */
/* Kernel handles                                                      */

typedef struct agd_kernel agd_kernel;

agd_kernel* agd_kernel_newtonian(int d);
agd_kernel* agd_kernel_logarithmic(double c, int d);
agd_kernel* agd_kernel_power(double c, double alpha, int d);
agd_kernel* agd_kernel_gaussian(double sigma, int d);
agd_kernel* agd_kernel_tabulated_csv(const char* path, int d);
void agd_kernel_free(agd_kernel* k);

/* Radial profile value and derivative at r > 0. Either out pointer may be NULL. */
int agd_kernel_eval(const agd_kernel* k, double r, double* value, double* derivative);
/* admissible: 1 when the kernel passes all Definition checks, else 0. */
int agd_kernel_admissible(const agd_kernel* k, int* admissible);
int agd_kernel_critical_exponent(const agd_kernel* k, double* m_star);

/* ------------------------------------------------------------------ */
/* Diffusion handles                                                   */

typedef struct agd_diffusion agd_diffusion;

agd_diffusion* agd_diffusion_power(double m);
agd_diffusion* agd_diffusion_saturated_linear(void);
agd_diffusion* agd_diffusion_power_plus_linear(double m, double slope);
void agd_diffusion_free(agd_diffusion* a);

int agd_diffusion_a(const agd_diffusion* a, double z, double* value);
/* admissible: 1 when (D1)-(D3) hold, else 0. */
int agd_diffusion_admissible(const agd_diffusion* a, int* admissible);
/* Entropy density Phi with Phi'' = A'(z)/z, Phi'(1) = 0, Phi(0) = 0. */
int agd_entropy_phi(const agd_diffusion* a, double z, double* phi);

/* Critical-mass prediction for a kernel/diffusion pair. mass is set to
 * +infinity in the infinite regime. Returns AGD_INDETERMINATE when the tail
 * fits have no usable trend. */
int agd_critical_mass(const agd_kernel* k, const agd_diffusion* a, double* m_star, double* mass);

#ifdef __cplusplus
}
#endif

#endif /* AGGDIFF_H */
