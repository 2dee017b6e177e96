#pragma once

#include <string>
#include <vector>

namespace amo {

// Dimensional parameters of the two-variable oscillator (concentrations in uM, fluxes in uM/ms).
struct BiophysicalParams {
    double alpha = 8.61e-4;  // uM/ms
    double beta = 2.31e-1;
    double eta = 7.69e-1;
    double nu = 1.04e-2;    // uM/ms
    double gamma = 5.20e-4; // uM/ms
    double omega = 1.00;    // uM
    double kappa1 = 1.12e1; // uM^3
    double kappa2 = 8.51;   // uM^2
    double kappa3 = 3.61e-3; // uM
    double kappa4 = 1.89e-4;
    double kappa5 = 1.55e1; // uM^3
    double kappa6 = 1.42e2; // uM^2

    void validate() const;  // throws std::domain_error naming the offending field
};

// Parameters of the full-flux F6P-FBP system (Smolen PFK formalism).
struct SmolenParams {
    double K_GPI = 3.33;
    double K_LG = 3e-1;
    double k_gk = 1.3e1;
    double g_lce = 7.0;
    double h_gkglc = 4.0;
    double k_PFK = 6e-2;
    double v_GK = 1.11e-2;  // uM/ms
    double v_PDH = 1.04e-3; // uM/ms
    double v_PFK = 1.04e-2; // uM/ms
    double A_tot = 3e3;     // uM
    double K1 = 3e1;        // uM
    double K2 = 1.0;        // uM
    double K3 = 2.24e2;     // uM
    double K4 = 3.16e1;     // uM
    double f13 = 2e-2;
    double f23 = 2e-1;
    double f41 = 2e1;
    double f42 = 2e1;
    double f43 = 2e1;
    double ATP_clamp = 1800.0;  // uM

    void validate() const;
};

struct ReferenceScales {
    double kappaX = 0;   // uM
    double kappaY = 0;   // uM
    double kappaTau = 0; // ms
};

struct DimensionlessParams {
    double hatAlpha = 0;
    double hatNu1 = 0;
    double hatNu2 = 0;
    double hatGamma = 0;
    double hatSigma1 = 0;
    double hatSigma2 = 0;
    double hatSigma3 = 0;
    double hatSigma4 = 0;
    double hatSigma6 = 0;

    void validate() const;
};

// O(1) prefactors of the small-parameter hierarchy, eps = hatSigma6^(1/4).
struct EpsilonParams {
    double epsilon = 0;
    double alpha = 0;
    double nu = 0;
    double gamma = 0;
    double sigma1 = 0;
    double sigma2 = 0;
    double sigma3 = 0;
    double sigma4 = 1.0;

    void validate() const;
    // re-expand to the hatted parameters at this epsilon
    DimensionlessParams expand() const;
    EpsilonParams with_epsilon(double eps) const {
        EpsilonParams e = *this;
        e.epsilon = eps;
        return e;
    }
};

struct ConditionCheck {
    std::string name;
    double measured = 0;
    double margin = 0;  // distance to the failure boundary, positive = pass
    bool pass = false;
};

struct ValidationReport {
    std::vector<ConditionCheck> checks;
    bool all_pass = false;
};

ReferenceScales compute_reference_scales(const BiophysicalParams& p);
DimensionlessParams nondimensionalise(const BiophysicalParams& p);
EpsilonParams extract_hierarchy(const DimensionlessParams& d);
ValidationReport validate_asymptotics(const DimensionlessParams& d);

// JSON round-trip; field names match the struct members.
std::string params_to_json(const BiophysicalParams& b, const SmolenParams& s);
void params_from_json(const std::string& text, BiophysicalParams& b, SmolenParams& s);

}  // namespace amo
