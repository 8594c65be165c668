#include "dsice/dynamics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dsice/errors.hpp"

namespace dsice {

const char* dim_name(int d) {
    static const char* names[] = {"K", "M_AT", "M_UO", "M_LO", "T_AT", "T_OC"};
    return (d >= 0 && d < kStateDim) ? names[d] : "?";
}

StepResult step(const State6& x, double zeta, double J, const PeriodContext& ctx, const Controls& c,
                const ModelParams& p, bool jacobian) {
    const auto& e = p.econ;
    const auto& cl = p.climate;
    const double theta2 = p.exo.theta2;
    const double K = x[Dim::K];
    if (!(K > 0.0)) throw DomainError("capital must be positive");
    if (!(x[MAT] > 0.0)) throw DomainError("M_AT must be positive");

    StepResult r;
    const double A = ctx.A * zeta;
    r.f = A * std::pow(K, e.alpha) * std::pow(ctx.L, 1.0 - e.alpha);
    const double T = x[TAT];
    const double dmg = 1.0 + e.pi1 * T + e.pi2 * T * T;
    const double Omega = (1.0 - J) / dmg;
    r.Y = Omega * r.f;
    const double mu_pow = std::pow(c.mu, theta2);
    const double g = 1.0 - ctx.theta1 * mu_pow;
    const double net = r.Y * g;
    r.Psi = r.Y - net;
    r.C = (1.0 - c.s) * net;
    r.I = c.s * net;
    r.E = ctx.sigma * (1.0 - c.mu) * r.f + ctx.E_land;

    const auto Pm = cl.carbon_matrix();
    const auto Pt = cl.temperature_matrix();
    const double F = cl.eta * std::log2(x[MAT] / cl.MAT_star) + ctx.F_ex;
    r.next[Dim::K] = (1.0 - e.delta) * K + r.I;
    r.next[MAT] = Pm[0] * x[MAT] + Pm[1] * x[MUO] + r.E;
    r.next[MUO] = Pm[3] * x[MAT] + Pm[4] * x[MUO] + Pm[5] * x[MLO];
    r.next[MLO] = Pm[7] * x[MUO] + Pm[8] * x[MLO];
    r.next[TAT] = Pt[0] * x[TAT] + Pt[1] * x[TOC] + cl.xi1 * F;
    r.next[TOC] = Pt[2] * x[TAT] + Pt[3] * x[TOC];

    const double psi = p.prefs.psi;
    const double ex = 1.0 - 1.0 / psi;
    if (!(r.C > 0.0)) {
        r.u = -std::numeric_limits<double>::infinity();
    } else {
        r.u = std::pow(r.C / ctx.L, ex) / ex * ctx.L;
    }
    if (!jacobian) return r;

    const double dY_dK = e.alpha * r.Y / K;
    const double dY_dT = -r.Y * (e.pi1 + 2.0 * e.pi2 * T) / dmg;
    const double dg_dmu = c.mu > 0.0 ? -ctx.theta1 * theta2 * mu_pow / c.mu : 0.0;
    const double df_dK = e.alpha * r.f / K;

    auto& D = r.dnext_dx;
    auto& G = r.dnext_dc;
    D[Dim::K][Dim::K] = (1.0 - e.delta) + c.s * g * dY_dK;
    D[Dim::K][TAT] = c.s * g * dY_dT;
    G[Dim::K][0] = net;
    G[Dim::K][1] = c.s * r.Y * dg_dmu;

    const double dE_dK = ctx.sigma * (1.0 - c.mu) * df_dK;
    D[MAT][Dim::K] = dE_dK;
    D[MAT][MAT] = Pm[0];
    D[MAT][MUO] = Pm[1];
    G[MAT][1] = -ctx.sigma * r.f;

    D[MUO][MAT] = Pm[3];
    D[MUO][MUO] = Pm[4];
    D[MUO][MLO] = Pm[5];
    D[MLO][MUO] = Pm[7];
    D[MLO][MLO] = Pm[8];

    D[TAT][MAT] = cl.xi1 * cl.eta / (x[MAT] * std::numbers::ln2);
    D[TAT][TAT] = Pt[0];
    D[TAT][TOC] = Pt[1];
    D[TOC][TAT] = Pt[2];
    D[TOC][TOC] = Pt[3];

    const double uc = r.C > 0.0 ? std::pow(r.C / ctx.L, -1.0 / psi) : 0.0;
    r.du_dx[Dim::K] = uc * (1.0 - c.s) * g * dY_dK;
    r.du_dx[TAT] = uc * (1.0 - c.s) * g * dY_dT;
    r.du_dc[0] = -uc * net;
    r.du_dc[1] = uc * (1.0 - c.s) * r.Y * dg_dmu;
    return r;
}

double carbon_tax(double mu, double theta1, double theta2, double sigma) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("mu must lie in [0, 1]");
    return 1000.0 * theta1 * theta2 * std::pow(mu, theta2 - 1.0) / sigma;
}

}  // namespace dsice
