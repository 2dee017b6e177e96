#include "amo/params.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace amo {

namespace {
void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::domain_error(std::string("parameter must be strictly positive: ") + field);
}
}  // namespace

void BiophysicalParams::validate() const {
    require_positive(alpha, "alpha");
    require_positive(beta, "beta");
    require_positive(eta, "eta");
    require_positive(nu, "nu");
    require_positive(gamma, "gamma");
    require_positive(omega, "omega");
    require_positive(kappa1, "kappa1");
    require_positive(kappa2, "kappa2");
    require_positive(kappa3, "kappa3");
    require_positive(kappa4, "kappa4");
    require_positive(kappa5, "kappa5");
    require_positive(kappa6, "kappa6");
}

void SmolenParams::validate() const {
    require_positive(K_GPI, "K_GPI");
    require_positive(K_LG, "K_LG");
    require_positive(k_gk, "k_gk");
    require_positive(g_lce, "g_lce");
    require_positive(h_gkglc, "h_gkglc");
    require_positive(k_PFK, "k_PFK");
    require_positive(v_GK, "v_GK");
    require_positive(v_PDH, "v_PDH");
    require_positive(v_PFK, "v_PFK");
    require_positive(A_tot, "A_tot");
    require_positive(K1, "K1");
    require_positive(K2, "K2");
    require_positive(K3, "K3");
    require_positive(K4, "K4");
    require_positive(f13, "f13");
    require_positive(f23, "f23");
    require_positive(f41, "f41");
    require_positive(f42, "f42");
    require_positive(f43, "f43");
    require_positive(ATP_clamp, "ATP_clamp");
    if (!(ATP_clamp < 4.0 * A_tot / 3.0))
        throw std::domain_error("ATP_clamp outside the conservation range (0, 4*A_tot/3)");
}

void DimensionlessParams::validate() const {
    require_positive(hatAlpha, "hatAlpha");
    require_positive(hatNu1, "hatNu1");
    require_positive(hatNu2, "hatNu2");
    require_positive(hatGamma, "hatGamma");
    require_positive(hatSigma1, "hatSigma1");
    require_positive(hatSigma2, "hatSigma2");
    require_positive(hatSigma3, "hatSigma3");
    require_positive(hatSigma4, "hatSigma4");
    require_positive(hatSigma6, "hatSigma6");
    if (!(hatSigma2 > hatSigma1 * hatSigma6))
        throw std::domain_error("positivity of r_Y requires hatSigma2 > hatSigma1*hatSigma6");
    if (!(hatSigma4 > hatSigma3 * hatSigma6))
        throw std::domain_error("positivity of r_Y requires hatSigma4 > hatSigma3*hatSigma6");
}

void EpsilonParams::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("epsilon must lie in (0, 1)");
    require_positive(alpha, "alpha");
    require_positive(nu, "nu");
    require_positive(gamma, "gamma");
    require_positive(sigma1, "sigma1");
    require_positive(sigma2, "sigma2");
    require_positive(sigma3, "sigma3");
    require_positive(sigma4, "sigma4");
    if (!(nu > 2.0 * sigma1 * alpha))
        throw std::domain_error("hierarchy violation: nu <= 2*sigma1*alpha");
    if (!(sigma2 < 2.0 / gamma))
        throw std::domain_error("hierarchy violation: sigma2 >= 2/gamma");
}

DimensionlessParams EpsilonParams::expand() const {
    DimensionlessParams d;
    double e2 = epsilon * epsilon;
    d.hatAlpha = alpha * epsilon;
    d.hatNu1 = nu * epsilon;
    d.hatNu2 = 1.0;
    d.hatGamma = gamma;
    d.hatSigma1 = sigma1;
    d.hatSigma2 = sigma2 * e2;
    d.hatSigma3 = sigma3 * e2;
    d.hatSigma4 = sigma4 * e2;
    d.hatSigma6 = e2 * e2;
    return d;
}

ReferenceScales compute_reference_scales(const BiophysicalParams& p) {
    p.validate();
    ReferenceScales s;
    double base = std::cbrt(p.kappa5 / p.kappa4);
    s.kappaY = base;
    s.kappaX = base * std::pow(p.kappa6 * p.kappa6 * p.kappa6 / (p.kappa4 * p.kappa5 * p.kappa5), 1.0 / 12.0);
    s.kappaTau = base / (p.eta * p.nu);
    return s;
}

DimensionlessParams nondimensionalise(const BiophysicalParams& p) {
    ReferenceScales s = compute_reference_scales(p);
    DimensionlessParams d;
    d.hatSigma1 = p.kappa5 / p.kappa1;
    d.hatSigma2 = p.kappa5 / (p.kappa2 * s.kappaY);
    d.hatSigma3 = p.kappa5 / (p.kappa3 * s.kappaX * s.kappaX);
    d.hatSigma4 = p.kappa5 / (p.kappa4 * s.kappaX * s.kappaX * s.kappaY);
    d.hatSigma6 = p.kappa5 / (p.kappa6 * s.kappaY);
    d.hatAlpha = s.kappaTau * p.beta * p.alpha / s.kappaX;
    d.hatNu1 = s.kappaTau * p.beta * p.nu / s.kappaX;
    double nu2 = s.kappaTau * p.eta * p.nu / s.kappaY;
    if (std::abs(nu2 - 1.0) > 1e-12)
        throw std::logic_error("nondimensionalise: hatNu2 deviates from 1");
    d.hatNu2 = 1.0;
    d.hatGamma = s.kappaTau * p.eta * p.gamma / std::sqrt(s.kappaY * p.omega);
    d.validate();
    return d;
}

EpsilonParams extract_hierarchy(const DimensionlessParams& d) {
    d.validate();
    EpsilonParams e;
    e.epsilon = std::pow(d.hatSigma6, 0.25);
    double e2 = e.epsilon * e.epsilon;
    e.alpha = d.hatAlpha / e.epsilon;
    e.nu = d.hatNu1 / e.epsilon;
    e.gamma = d.hatGamma;
    e.sigma1 = d.hatSigma1;
    e.sigma2 = d.hatSigma2 / e2;
    e.sigma3 = d.hatSigma3 / e2;
    e.sigma4 = d.hatSigma4 / e2;
    e.validate();
    return e;
}

ValidationReport validate_asymptotics(const DimensionlessParams& d) {
    ValidationReport r;
    auto add = [&r](const std::string& name, double measured, double margin) {
        r.checks.push_back({name, measured, margin, margin > 0.0});
    };
    double sq6 = std::sqrt(d.hatSigma6);
    double sigma2 = d.hatSigma2 / sq6;

    // exponent of the hatSigma2 ~ hatSigma6^a correlation; needs a in [1/2, 1)
    double a = std::log(d.hatSigma2) / std::log(d.hatSigma6);
    add("sigma2_exponent_in_[0.5,1)", a, std::min(a - 0.5, 0.999999 - a) + 0.0);

    // border case a = 1/2 requires sigma2 = hatSigma2/sqrt(hatSigma6) < 2/hatGamma
    add("sigma2_below_2_over_gamma", sigma2, 2.0 / d.hatGamma - sigma2);

    // hatSigma4/hatSigma3 ~ O(1): flag only order-of-magnitude breaks
    double ratio43 = d.hatSigma4 / d.hatSigma3;
    add("sigma4_over_sigma3_order_one", ratio43, std::min(ratio43 - 0.1, 10.0 - ratio43));

    // hatNu1/hatAlpha ~ O(1)
    double ratio_na = d.hatNu1 / d.hatAlpha;
    add("nu1_over_alpha_order_one", ratio_na, std::min(ratio_na - 0.1, 100.0 - ratio_na));

    // final condition nu1 > 2 sigma1 alpha
    add("nu1_minus_2_sigma1_alpha", d.hatNu1 - 2.0 * d.hatSigma1 * d.hatAlpha,
        d.hatNu1 - 2.0 * d.hatSigma1 * d.hatAlpha);

    r.all_pass = true;
    for (const auto& c : r.checks) r.all_pass = r.all_pass && c.pass;
    return r;
}

std::string params_to_json(const BiophysicalParams& b, const SmolenParams& s) {
    nlohmann::ordered_json j;
    j["biophysical"] = {{"alpha", b.alpha},   {"beta", b.beta},     {"eta", b.eta},
                        {"nu", b.nu},         {"gamma", b.gamma},   {"omega", b.omega},
                        {"kappa1", b.kappa1}, {"kappa2", b.kappa2}, {"kappa3", b.kappa3},
                        {"kappa4", b.kappa4}, {"kappa5", b.kappa5}, {"kappa6", b.kappa6}};
    j["smolen"] = {{"K_GPI", s.K_GPI}, {"K_LG", s.K_LG},     {"k_gk", s.k_gk},
                   {"g_lce", s.g_lce}, {"h_gkglc", s.h_gkglc}, {"k_PFK", s.k_PFK},
                   {"v_GK", s.v_GK},   {"v_PDH", s.v_PDH},   {"v_PFK", s.v_PFK},
                   {"A_tot", s.A_tot}, {"K1", s.K1},         {"K2", s.K2},
                   {"K3", s.K3},       {"K4", s.K4},         {"f13", s.f13},
                   {"f23", s.f23},     {"f41", s.f41},       {"f42", s.f42},
                   {"f43", s.f43},     {"ATP_clamp", s.ATP_clamp}};
    return j.dump(2);
}

void params_from_json(const std::string& text, BiophysicalParams& b, SmolenParams& s) {
    auto j = nlohmann::json::parse(text);
    auto get = [](const nlohmann::json& o, const char* key) {
        if (!o.contains(key))
            throw std::invalid_argument(std::string("missing parameter field: ") + key);
        return o.at(key).get<double>();
    };
    if (j.contains("biophysical")) {
        const auto& o = j.at("biophysical");
        b.alpha = get(o, "alpha");
        b.beta = get(o, "beta");
        b.eta = get(o, "eta");
        b.nu = get(o, "nu");
        b.gamma = get(o, "gamma");
        b.omega = get(o, "omega");
        b.kappa1 = get(o, "kappa1");
        b.kappa2 = get(o, "kappa2");
        b.kappa3 = get(o, "kappa3");
        b.kappa4 = get(o, "kappa4");
        b.kappa5 = get(o, "kappa5");
        b.kappa6 = get(o, "kappa6");
    }
    if (j.contains("smolen")) {
        const auto& o = j.at("smolen");
        s.K_GPI = get(o, "K_GPI");
        s.K_LG = get(o, "K_LG");
        s.k_gk = get(o, "k_gk");
        s.g_lce = get(o, "g_lce");
        s.h_gkglc = get(o, "h_gkglc");
        s.k_PFK = get(o, "k_PFK");
        s.v_GK = get(o, "v_GK");
        s.v_PDH = get(o, "v_PDH");
        s.v_PFK = get(o, "v_PFK");
        s.A_tot = get(o, "A_tot");
        s.K1 = get(o, "K1");
        s.K2 = get(o, "K2");
        s.K3 = get(o, "K3");
        s.K4 = get(o, "K4");
        s.f13 = get(o, "f13");
        s.f23 = get(o, "f23");
        s.f41 = get(o, "f41");
        s.f42 = get(o, "f42");
        s.f43 = get(o, "f43");
        s.ATP_clamp = get(o, "ATP_clamp");
    }
    b.validate();
    s.validate();
}

}  // namespace amo
