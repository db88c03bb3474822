#include "aggdiff.h"

#include <cmath>
#include <string>

#include "app/commands.hpp"
#include "core/diffusion.hpp"
#include "core/energy.hpp"
#include "core/kernel.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <class F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const aggdiff::IndeterminateError& e) {
        set_error(e.what());
        return AGD_INDETERMINATE;
    } catch (const std::exception& e) {
        set_error(e.what());
        return AGD_ERROR;
    }
}

template <class F>
auto make_handle(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

}  // namespace

struct agd_kernel {
    aggdiff::KernelSpec spec;
};

struct agd_diffusion {
    aggdiff::DiffusionSpec spec;
};

extern "C" {

const char* agd_last_error(void) { return g_last_error.c_str(); }

int agd_cmd_check_kernel(const char* config_path, const char* out_dir, int verbose) {
    return guarded([&] { return aggdiff::cmd_check_kernel(config_path, out_dir, verbose != 0); });
}
int agd_cmd_classify(const char* config_path, const char* out_dir, int verbose) {
    return guarded([&] { return aggdiff::cmd_classify(config_path, out_dir, verbose != 0); });
}
int agd_cmd_simulate(const char* config_path, const char* out_dir, int verbose) {
    return guarded([&] { return aggdiff::cmd_simulate(config_path, out_dir, verbose != 0); });
}
int agd_cmd_sweep(const char* config_path, const char* out_dir, int verbose) {
    return guarded([&] { return aggdiff::cmd_sweep(config_path, out_dir, verbose != 0); });
}
int agd_cmd_virial(const char* config_path, const char* out_dir, int verbose) {
    return guarded([&] { return aggdiff::cmd_virial(config_path, out_dir, verbose != 0); });
}
int agd_cmd_barenblatt(const char* config_path, const char* out_dir, int verbose) {
    return guarded([&] { return aggdiff::cmd_barenblatt(config_path, out_dir, verbose != 0); });
}

agd_kernel* agd_kernel_newtonian(int d) {
    return make_handle([&]() -> agd_kernel* {
        return new agd_kernel{aggdiff::KernelSpec::newtonian(d)};
    });
}
agd_kernel* agd_kernel_logarithmic(double c, int d) {
    return make_handle([&]() -> agd_kernel* {
        return new agd_kernel{aggdiff::KernelSpec::logarithmic(c, d)};
    });
}
agd_kernel* agd_kernel_power(double c, double alpha, int d) {
    return make_handle([&]() -> agd_kernel* {
        return new agd_kernel{aggdiff::KernelSpec::power_law(c, alpha, d)};
    });
}
agd_kernel* agd_kernel_gaussian(double sigma, int d) {
    return make_handle([&]() -> agd_kernel* {
        return new agd_kernel{aggdiff::KernelSpec::gaussian(sigma, d)};
    });
}
agd_kernel* agd_kernel_tabulated_csv(const char* path, int d) {
    return make_handle([&]() -> agd_kernel* {
        return new agd_kernel{aggdiff::KernelSpec::tabulated_from_csv(path, d)};
    });
}
void agd_kernel_free(agd_kernel* k) { delete k; }

int agd_kernel_eval(const agd_kernel* k, double r, double* value, double* derivative) {
    if (!k) {
        set_error("null kernel handle");
        return AGD_ERROR;
    }
    return guarded([&] {
        const aggdiff::KernelEval e = k->spec.eval(r);
        if (value) *value = e.k;
        if (derivative) *derivative = e.kp;
        return AGD_OK;
    });
}

int agd_kernel_admissible(const agd_kernel* k, int* admissible) {
    if (!k || !admissible) {
        set_error("null argument");
        return AGD_ERROR;
    }
    return guarded([&] {
        *admissible = aggdiff::check_admissible(k->spec).overall ? 1 : 0;
        return AGD_OK;
    });
}

int agd_kernel_critical_exponent(const agd_kernel* k, double* m_star) {
    if (!k || !m_star) {
        set_error("null argument");
        return AGD_ERROR;
    }
    return guarded([&] {
        *m_star = aggdiff::critical_exponent(k->spec);
        return AGD_OK;
    });
}

agd_diffusion* agd_diffusion_power(double m) {
    return make_handle([&]() -> agd_diffusion* {
        return new agd_diffusion{aggdiff::DiffusionSpec::power_law(m)};
    });
}
agd_diffusion* agd_diffusion_saturated_linear(void) {
    return make_handle([&]() -> agd_diffusion* {
        return new agd_diffusion{aggdiff::DiffusionSpec::saturated_linear()};
    });
}
agd_diffusion* agd_diffusion_power_plus_linear(double m, double slope) {
    return make_handle([&]() -> agd_diffusion* {
        return new agd_diffusion{aggdiff::DiffusionSpec::power_plus_linear(m, slope)};
    });
}
void agd_diffusion_free(agd_diffusion* a) { delete a; }

int agd_diffusion_a(const agd_diffusion* a, double z, double* value) {
    if (!a || !value) {
        set_error("null argument");
        return AGD_ERROR;
    }
    return guarded([&] {
        *value = a->spec.a(z);
        return AGD_OK;
    });
}

int agd_diffusion_admissible(const agd_diffusion* a, int* admissible) {
    if (!a || !admissible) {
        set_error("null argument");
        return AGD_ERROR;
    }
    return guarded([&] {
        *admissible = aggdiff::check_admissible_diffusion(a->spec).overall ? 1 : 0;
        return AGD_OK;
    });
}

int agd_entropy_phi(const agd_diffusion* a, double z, double* phi) {
    if (!a || !phi) {
        set_error("null argument");
        return AGD_ERROR;
    }
    return guarded([&] {
        const aggdiff::EntropyDensity density(a->spec);
        *phi = density.phi(z);
        return AGD_OK;
    });
}

int agd_critical_mass(const agd_kernel* k, const agd_diffusion* a, double* m_star, double* mass) {
    if (!k || !a) {
        set_error("null handle");
        return AGD_ERROR;
    }
    return guarded([&] {
        const aggdiff::CriticalMassPrediction pred = aggdiff::critical_mass(k->spec, a->spec);
        if (m_star) *m_star = pred.m_star;
        if (mass) *mass = pred.mass;
        return AGD_OK;
    });
}

}  // extern "C"
