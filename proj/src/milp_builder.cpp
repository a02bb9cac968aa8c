#include <cmath>

#include "ebus/energy.hpp"
#include "ebus/milp.hpp"

namespace ebus::milp {

namespace {

// Index tables for the variable families, -1 where a variable was not created
// (presence-based sparsification: assignment variables exist only where the
// bus is actually parked at a depot during the slot).
struct Builder {
    const ProblemInstance& inst;
    const EventTimeline& tl;
    const ScenarioConfig& sc;
    Model m;

    int K, J, E;
    // per (k,e): ids per charger of the parked depot (empty if not parked)
    std::vector<std::vector<std::vector<int>>> x, y, dc, dd;
    std::vector<std::vector<int>> lc, ld, vc, vd, ac, ad;  // -1 when absent
    std::vector<std::vector<int>> soc, wp, wm, deg, mu, z, pi, ess, manc;
    std::vector<int> upeak;
    std::vector<double> deg_coeff;  // per bus
    std::vector<bool> pv_depot;     // depot participates in PV/ESS constraint families

    Builder(const ProblemInstance& i, const EventTimeline& t, const ScenarioConfig& s)
        : inst(i), tl(t), sc(s) {
        K = static_cast<int>(inst.buses.size());
        J = static_cast<int>(inst.depots.size());
        E = tl.num_events();
    }

    int parked(int k, int e) const { return tl.parked_depot[k][e]; }
    double dt(int e) const { return tl.events[e].slot_minutes; }
    // battery-side kWh per minute of charging on charger n at depot j
    double charge_rate(int j, int n) const {
        const auto& c = inst.depots[j].chargers[n];
        return c.charge_efficiency_frac * c.charge_power_kw / 60.0;
    }
    // battery-side kWh per minute of discharging
    double discharge_rate_battery(int j, int n) const {
        const auto& c = inst.depots[j].chargers[n];
        return c.discharge_power_kw / c.discharge_efficiency_frac / 60.0;
    }
    // grid-side kWh per minute of discharging
    double discharge_rate_grid(int j, int n) const {
        return inst.depots[j].chargers[n].discharge_power_kw / 60.0;
    }

    void create_variables();
    void add_objective();
    void add_assignment_constraints();
    void add_energy_balance();
    void add_soc_bounds();
    void add_ess_constraints();
    void add_degradation();
    void add_duration_linking();
    void add_min_session_constraints();
    void add_pv_constraints();
    void add_session_transition_constraints();
    void add_start_gating();
    void add_peak_power_constraints();
    void restrict_discharge_windows();
};

void Builder::create_variables() {
    x.assign(K, std::vector<std::vector<int>>(E));
    y = dc = dd = x;
    lc.assign(K, std::vector<int>(E, -1));
    ld = vc = vd = ac = ad = lc;
    soc.assign(K, std::vector<int>(E, -1));
    deg = soc;
    wp.assign(J, std::vector<int>(E, -1));
    wm = mu = z = pi = ess = manc = wp;

    deg_coeff.resize(K);
    for (int k = 0; k < K; ++k) deg_coeff[k] = energy::degradation_coefficient(inst.buses[k]);

    pv_depot.assign(J, false);
    for (int j = 0; j < J; ++j)
        pv_depot[j] = sc.enable_pv_ess &&
                      (inst.depots[j].pv_area_m2 > 0.0 || inst.depots[j].ess_capacity_kwh > 0.0);

    for (int k = 0; k < K; ++k) {
        for (int e = 0; e < E; ++e) {
            int j = parked(k, e);
            if (j < 0) continue;
            int N = static_cast<int>(inst.depots[j].chargers.size());
            x[k][e].assign(N, -1);
            y[k][e].assign(N, -1);
            dc[k][e].assign(N, -1);
            dd[k][e].assign(N, -1);
            for (int n = 0; n < N; ++n) {
                x[k][e][n] = m.add_binary(var_x(j + 1, k + 1, n + 1, e + 1));
                y[k][e][n] = m.add_binary(var_y(j + 1, k + 1, n + 1, e + 1));
                dc[k][e][n] = m.add_continuous(var_dchar(j + 1, k + 1, n + 1, e + 1), 0.0, dt(e));
                dd[k][e][n] = m.add_continuous(var_ddis(j + 1, k + 1, n + 1, e + 1), 0.0, dt(e));
            }
            lc[k][e] = m.add_binary(var_lchar(k + 1, e + 1));
            ld[k][e] = m.add_binary(var_ldis(k + 1, e + 1));
            if (e > 0 && !x[k][e - 1].empty()) {
                vc[k][e] = m.add_binary(var_vchar(k + 1, e + 1));
                vd[k][e] = m.add_binary(var_vdis(k + 1, e + 1));
            }
        }
        // Stop indicators exist where a session could be running, plus the
        // final event, which is fixed to "stopped".
        for (int e = 0; e < E; ++e)
            if ((e + 1 < E && !x[k][e].empty()) || e + 1 == E) {
                ac[k][e] = m.add_binary(var_achar(k + 1, e + 1));
                ad[k][e] = m.add_binary(var_adis(k + 1, e + 1));
            }
        const BusSpec& b = inst.buses[k];
        for (int e = 0; e < E; ++e) {
            soc[k][e] = m.add_continuous(var_soc(k + 1, e + 1), b.min_energy_kwh(),
                                         b.max_energy_kwh());
            deg[k][e] = m.add_continuous(var_deg(k + 1, e + 1));
            if (!sc.enable_degradation) m.fix(deg[k][e], 0.0);
        }
    }

    for (int j = 0; j < J; ++j) {
        const DepotSpec& d = inst.depots[j];
        bool has_ess = pv_depot[j] && d.ess_capacity_kwh > 0.0;
        for (int e = 0; e < E; ++e) {
            wp[j][e] = m.add_continuous(var_wbuy(j + 1, e + 1));
            wm[j][e] = m.add_continuous(var_wsell(j + 1, e + 1));
            mu[j][e] = m.add_continuous(var_mu(j + 1, e + 1));
            z[j][e] = m.add_continuous(var_z(j + 1, e + 1));
            pi[j][e] = m.add_continuous(var_pi(j + 1, e + 1));
            ess[j][e] = m.add_continuous(var_ess(j + 1, e + 1));
            manc[j][e] = m.add_continuous(var_manc(j + 1, e + 1));
            if (!pv_depot[j]) {
                m.fix(mu[j][e], 0.0);
                m.fix(z[j][e], 0.0);
                m.fix(pi[j][e], 0.0);
                m.fix(ess[j][e], 0.0);
                m.fix(manc[j][e], 0.0);
            } else {
                if (has_ess) {
                    m.set_bounds(ess[j][e], d.ess_soc_min_frac * d.ess_capacity_kwh,
                                 d.ess_capacity_kwh);
                    m.set_bounds(manc[j][e], 0.0, d.ess_capacity_kwh);
                } else {
                    m.fix(z[j][e], 0.0);
                    m.fix(pi[j][e], 0.0);
                    m.fix(ess[j][e], 0.0);
                    m.fix(manc[j][e], 0.0);
                }
            }
        }
        if (has_ess) {
            m.fix(ess[j][0], d.ess_soc_min_frac * d.ess_capacity_kwh);  // initial ESS level
            m.fix(manc[j][E - 1], 0.0);  // no grid injection during the day transition
        }
    }

    if (sc.enable_peak_cost)
        for (size_t l = 0; l < inst.peak_ladder.levels.size(); ++l)
            upeak.push_back(m.add_binary(var_upeak(static_cast<int>(l) + 1)));
}

void Builder::add_objective() {
    if (sc.enable_peak_cost)
        for (size_t l = 0; l < upeak.size(); ++l)
            m.add_objective_term(upeak[l], inst.peak_ladder.levels[l].daily_price_eur);
    for (int j = 0; j < J; ++j)
        for (int e = 0; e < E; ++e) {
            m.add_objective_term(wp[j][e], tl.buy_price[e]);
            if (sc.enable_v2g || sc.enable_pv_ess)
                m.add_objective_term(wm[j][e], -tl.sell_price[e]);
        }
    if (sc.enable_degradation)
        for (int k = 0; k < K; ++k)
            for (int e = 0; e < E; ++e) m.add_objective_term(deg[k][e], 1.0);
}

// (2): one activity per bus and slot, none while serving a trip.
// (3): at most one bus per charger. (4): engagement requires presence.
// (24): at most |N_j| buses active per depot.
void Builder::add_assignment_constraints() {
    for (int k = 0; k < K; ++k)
        for (int e = 0; e < E; ++e) {
            std::vector<std::pair<int, double>> terms;
            for (int v : x[k][e]) terms.push_back({v, 1.0});
            for (int v : y[k][e]) terms.push_back({v, 1.0});
            double rhs = tl.serving_trip[k][e] >= 0 ? 0.0 : 1.0;
            m.add_row(strfmt("c2(%d,%d)", k + 1, e + 1), Sense::kLe, rhs, std::move(terms));
        }

    for (int j = 0; j < J; ++j) {
        int N = static_cast<int>(inst.depots[j].chargers.size());
        for (int n = 0; n < N; ++n)
            for (int e = 0; e < E; ++e) {
                std::vector<std::pair<int, double>> terms;
                for (int k = 0; k < K; ++k)
                    if (parked(k, e) == j) {
                        terms.push_back({x[k][e][n], 1.0});
                        terms.push_back({y[k][e][n], 1.0});
                    }
                m.add_row(strfmt("c3(%d,%d,%d)", j + 1, n + 1, e + 1), Sense::kLe, 1.0,
                          std::move(terms));
            }
    }

    // (4) per its prose: x + y <= l. Assignment variables only exist where
    // l = 1, so the row reduces to x + y <= 1 on those tuples.
    for (int k = 0; k < K; ++k)
        for (int e = 0; e < E; ++e) {
            int j = parked(k, e);
            if (j < 0) continue;
            for (size_t n = 0; n < x[k][e].size(); ++n)
                m.add_row(strfmt("c4(%d,%d,%zu,%d)", j + 1, k + 1, n + 1, e + 1), Sense::kLe, 1.0,
                          {{x[k][e][n], 1.0}, {y[k][e][n], 1.0}});
        }

    for (int j = 0; j < J; ++j)
        for (int e = 0; e < E; ++e) {
            std::vector<std::pair<int, double>> terms;
            for (int k = 0; k < K; ++k)
                if (parked(k, e) == j) {
                    for (int v : x[k][e]) terms.push_back({v, 1.0});
                    for (int v : y[k][e]) terms.push_back({v, 1.0});
                }
            m.add_row(strfmt("c24(%d,%d)", j + 1, e + 1), Sense::kLe,
                      static_cast<double>(inst.depots[j].chargers.size()), std::move(terms));
        }
}

// (5): battery energy recursion; (6)/(7): depot-level purchased/sold energy.
void Builder::add_energy_balance() {
    for (int k = 0; k < K; ++k)
        for (int e = 0; e + 1 < E; ++e) {
            std::vector<std::pair<int, double>> terms;
            terms.push_back({soc[k][e + 1], 1.0});
            terms.push_back({soc[k][e], -1.0});
            int j = parked(k, e);
            if (j >= 0)
                for (size_t n = 0; n < dc[k][e].size(); ++n) {
                    terms.push_back({dc[k][e][n], -charge_rate(j, static_cast<int>(n))});
                    terms.push_back({dd[k][e][n], discharge_rate_battery(j, static_cast<int>(n))});
                }
            double drain = 0.0;
            int i = tl.serving_trip[k][e];
            if (i >= 0)
                drain = energy::trip_consumption_rate(inst.trips[i]) *
                        energy::trip_speed_kmh(inst.trips[i]) * dt(e) / 60.0;
            m.add_row(strfmt("c5(%d,%d)", k + 1, e + 1), Sense::kEq, -drain, std::move(terms));
        }

    for (int j = 0; j < J; ++j)
        for (int e = 0; e < E; ++e) {
            std::vector<std::pair<int, double>> buy_terms, sell_terms;
            for (int k = 0; k < K; ++k)
                if (parked(k, e) == j)
                    for (size_t n = 0; n < dc[k][e].size(); ++n) {
                        buy_terms.push_back({dc[k][e][n], charge_rate(j, static_cast<int>(n))});
                        double r = sc.paper_literal_mode
                                       ? discharge_rate_battery(j, static_cast<int>(n))
                                       : discharge_rate_grid(j, static_cast<int>(n));
                        sell_terms.push_back({dd[k][e][n], r});
                    }
            buy_terms.push_back({wp[j][e], -1.0});
            buy_terms.push_back({mu[j][e], -1.0});
            buy_terms.push_back({z[j][e], -1.0});
            m.add_row(strfmt("c6(%d,%d)", j + 1, e + 1), Sense::kEq, 0.0, std::move(buy_terms));

            sell_terms.push_back({manc[j][e], 1.0});
            sell_terms.push_back({wm[j][e], -1.0});
            m.add_row(strfmt("c7(%d,%d)", j + 1, e + 1), Sense::kEq, 0.0, std::move(sell_terms));
        }
}

// (8)/(9) live on the soc variable bounds; (10)/(11) anchor first/last event.
void Builder::add_soc_bounds() {
    for (int k = 0; k < K; ++k) {
        const BusSpec& b = inst.buses[k];
        m.add_row(strfmt("c10(%d)", k + 1), Sense::kEq, b.initial_energy_kwh(),
                  {{soc[k][0], 1.0}});
        m.add_row(strfmt("c11(%d)", k + 1), Sense::kGe, b.end_energy_kwh(),
                  {{soc[k][E - 1], 1.0}});
    }
}

// (14): ESS energy recursion. (12)/(13)/(15)/(16)/(18) are variable bounds and
// fixes set during variable creation; (17) fixes the final-slot injection.
void Builder::add_ess_constraints() {
    for (int j = 0; j < J; ++j) {
        if (!pv_depot[j] || inst.depots[j].ess_capacity_kwh <= 0.0) continue;
        for (int e = 0; e + 1 < E; ++e) {
            double theta = tl.sun[e] ? 1.0 : 0.0;
            std::vector<std::pair<int, double>> terms = {
                {ess[j][e + 1], 1.0}, {ess[j][e], -1.0}, {manc[j][e], 1.0}};
            if (theta > 0.0) terms.push_back({pi[j][e], -theta});
            if (theta < 1.0) terms.push_back({z[j][e], 1.0 - theta});
            m.add_row(strfmt("c14(%d,%d)", j + 1, e + 1), Sense::kEq, 0.0, std::move(terms));
        }
    }
}

// (19): per-slot degradation cost. Literal form charges full-slot discharge
// power times the indicator; consistent form charges the battery-side energy
// actually discharged.
void Builder::add_degradation() {
    if (!sc.enable_degradation) return;
    for (int k = 0; k < K; ++k)
        for (int e = 0; e < E; ++e) {
            std::vector<std::pair<int, double>> terms = {{deg[k][e], 1.0}};
            int j = parked(k, e);
            if (j >= 0)
                for (size_t n = 0; n < y[k][e].size(); ++n) {
                    if (sc.paper_literal_mode)
                        terms.push_back({y[k][e][n],
                                         -deg_coeff[k] *
                                             inst.depots[j].chargers[n].discharge_power_kw *
                                             dt(e) / 60.0});
                    else
                        terms.push_back({dd[k][e][n],
                                         -deg_coeff[k] *
                                             discharge_rate_battery(j, static_cast<int>(n))});
                }
            m.add_row(strfmt("c19(%d,%d)", k + 1, e + 1), Sense::kEq, 0.0, std::move(terms));
        }
}

// (20)-(23): duration <-> indicator linking with big-M = slot length.
void Builder::add_duration_linking() {
    for (int k = 0; k < K; ++k)
        for (int e = 0; e < E; ++e) {
            int j = parked(k, e);
            if (j < 0) continue;
            for (size_t n = 0; n < x[k][e].size(); ++n) {
                m.add_row(strfmt("c20(%d,%d,%zu,%d)", j + 1, k + 1, n + 1, e + 1), Sense::kGe,
                          1.0 - dt(e), {{dc[k][e][n], 1.0}, {x[k][e][n], -dt(e)}});
                m.add_row(strfmt("c21(%d,%d,%zu,%d)", j + 1, k + 1, n + 1, e + 1), Sense::kLe, 0.0,
                          {{dc[k][e][n], 1.0}, {x[k][e][n], -dt(e)}});
                m.add_row(strfmt("c22(%d,%d,%zu,%d)", j + 1, k + 1, n + 1, e + 1), Sense::kGe,
                          1.0 - dt(e), {{dd[k][e][n], 1.0}, {y[k][e][n], -dt(e)}});
                m.add_row(strfmt("c23(%d,%d,%zu,%d)", j + 1, k + 1, n + 1, e + 1), Sense::kLe, 0.0,
                          {{dd[k][e][n], 1.0}, {y[k][e][n], -dt(e)}});
            }
        }
}

// (25)-(28): a session start commits the bus for V_e slots totalling at least
// tau_m minutes. (29): at most one connection after the last trip.
void Builder::add_min_session_constraints() {
    for (int k = 0; k < K; ++k)
        for (int e = 0; e < E; ++e) {
            std::vector<std::pair<int, double>> dur_c, cnt_c, dur_d, cnt_d;
            for (int e2 = e; e2 < std::min(E, e + tl.min_slots[e]); ++e2)
                for (size_t n = 0; n < dc[k][e2].size(); ++n) {
                    dur_c.push_back({dc[k][e2][n], 1.0});
                    cnt_c.push_back({x[k][e2][n], 1.0});
                    dur_d.push_back({dd[k][e2][n], 1.0});
                    cnt_d.push_back({y[k][e2][n], 1.0});
                }
            double tau = sc.min_session_minutes;
            double V = tl.min_slots[e];
            if (lc[k][e] >= 0) {
                dur_c.push_back({lc[k][e], -tau});
                cnt_c.push_back({lc[k][e], -V});
            }
            if (ld[k][e] >= 0) {
                dur_d.push_back({ld[k][e], -tau});
                cnt_d.push_back({ld[k][e], -V});
            }
            m.add_row(strfmt("c25(%d,%d)", k + 1, e + 1), Sense::kGe, 0.0, std::move(dur_c));
            m.add_row(strfmt("c26(%d,%d)", k + 1, e + 1), Sense::kGe, 0.0, std::move(cnt_c));
            m.add_row(strfmt("c27(%d,%d)", k + 1, e + 1), Sense::kGe, 0.0, std::move(dur_d));
            m.add_row(strfmt("c28(%d,%d)", k + 1, e + 1), Sense::kGe, 0.0, std::move(cnt_d));
        }

    if (sc.single_overnight_connection)
        for (int k = 0; k < K; ++k) {
            std::vector<std::pair<int, double>> terms;
            for (int e = tl.last_return_event[k] - 1; e < E; ++e)
                if (lc[k][e] >= 0) terms.push_back({lc[k][e], 1.0});
            m.add_row(strfmt("c29(%d)", k + 1), Sense::kLe, 1.0, std::move(terms));
        }
}

// (30)-(33): PV usage/storage caps and ESS draw only while the sun is down.
void Builder::add_pv_constraints() {
    for (int j = 0; j < J; ++j) {
        if (!pv_depot[j]) continue;
        for (int e = 0; e < E; ++e) {
            std::vector<std::pair<int, double>> charge_terms;
            for (int k = 0; k < K; ++k)
                if (parked(k, e) == j)
                    for (size_t n = 0; n < dc[k][e].size(); ++n)
                        charge_terms.push_back({dc[k][e][n], charge_rate(j, static_cast<int>(n))});

            m.add_row(strfmt("c30(%d,%d)", j + 1, e + 1), Sense::kLe, tl.pv_yield[j][e],
                      {{mu[j][e], 1.0}});
            auto t31 = charge_terms;
            t31.push_back({mu[j][e], -1.0});
            m.add_row(strfmt("c31(%d,%d)", j + 1, e + 1), Sense::kGe, 0.0, std::move(t31));
            m.add_row(strfmt("c32(%d,%d)", j + 1, e + 1), Sense::kLe, tl.pv_yield[j][e],
                      {{mu[j][e], 1.0}, {pi[j][e], 1.0}});
            std::vector<std::pair<int, double>> t33 = {{z[j][e], 1.0}};
            if (!tl.sun[e])
                for (auto [v, c] : charge_terms) t33.push_back({v, -c});
            m.add_row(strfmt("c33(%d,%d)", j + 1, e + 1), Sense::kLe, 0.0, std::move(t33));
        }
    }
}

// (34)-(43): continuation indicators v and session-start indicators lambda.
// (44)-(49): stop indicators a and same-charger continuity.
void Builder::add_session_transition_constraints() {
    auto emit = [&](const std::vector<std::vector<std::vector<int>>>& assign,
                    const std::vector<std::vector<int>>& cont,
                    const std::vector<std::vector<int>>& start,
                    const std::vector<std::vector<int>>& stop, const char* f34, const char* f35,
                    const char* f36, const char* f37, const char* f44, const char* f45,
                    const char* f48) {
        for (int k = 0; k < K; ++k) {
            for (int e = 0; e < E; ++e) {
                if (cont[k][e] >= 0) {
                    std::vector<std::pair<int, double>> t34 = {{cont[k][e], 1.0}};
                    for (int v : assign[k][e - 1]) t34.push_back({v, -1.0});
                    m.add_row(strfmt("%s(%d,%d)", f34, k + 1, e + 1), Sense::kLe, 0.0,
                              std::move(t34));
                    std::vector<std::pair<int, double>> t35 = {{cont[k][e], 1.0}};
                    for (int v : assign[k][e]) t35.push_back({v, -1.0});
                    m.add_row(strfmt("%s(%d,%d)", f35, k + 1, e + 1), Sense::kLe, 0.0,
                              std::move(t35));
                    std::vector<std::pair<int, double>> t36 = {{cont[k][e], 1.0}};
                    for (int v : assign[k][e]) t36.push_back({v, -1.0});
                    for (int v : assign[k][e - 1]) t36.push_back({v, -1.0});
                    m.add_row(strfmt("%s(%d,%d)", f36, k + 1, e + 1), Sense::kGe, -1.0,
                              std::move(t36));
                }
                if (start[k][e] >= 0) {
                    std::vector<std::pair<int, double>> t37 = {{start[k][e], 1.0}};
                    for (int v : assign[k][e]) t37.push_back({v, -1.0});
                    if (cont[k][e] >= 0) t37.push_back({cont[k][e], 1.0});
                    m.add_row(strfmt("%s(%d,%d)", f37, k + 1, e + 1), Sense::kEq, 0.0,
                              std::move(t37));
                }
                if (stop[k][e] >= 0 && e + 1 < E) {
                    std::vector<std::pair<int, double>> t44 = {{stop[k][e], 1.0}};
                    for (int v : assign[k][e]) t44.push_back({v, -1.0});
                    if (cont[k][e + 1] >= 0) t44.push_back({cont[k][e + 1], 1.0});
                    m.add_row(strfmt("%s(%d,%d)", f44, k + 1, e + 1), Sense::kEq, 0.0,
                              std::move(t44));
                    // same charger while the session continues
                    int j = parked(k, e);
                    for (size_t n = 0; n < assign[k][e].size(); ++n) {
                        std::vector<std::pair<int, double>> t45 = {{stop[k][e], 1.0},
                                                                   {assign[k][e][n], -1.0}};
                        if (parked(k, e + 1) == j && n < assign[k][e + 1].size())
                            t45.push_back({assign[k][e + 1][n], 1.0});
                        m.add_row(strfmt("%s(%d,%d,%zu,%d)", f45, j + 1, k + 1, n + 1, e + 1),
                                  Sense::kGe, 0.0, std::move(t45));
                    }
                }
            }
            m.add_row(strfmt("%s(%d)", f48, k + 1), Sense::kEq, 1.0, {{stop[k][E - 1], 1.0}});
        }
    };
    emit(x, vc, lc, ac, "c34", "c35", "c36", "c37", "c44", "c45", "c48");
    emit(y, vd, ld, ad, "c39", "c40", "c41", "c42", "c46", "c47", "c49");
}

// (50): sessions may only start at events with an arrival/departure at the
// bus's current depot. Emitted per the constraint's prose for the depot where
// the bus is present (the printed for-all-j form would force lambda = 0
// whenever any other depot exists).
void Builder::add_start_gating() {
    for (int k = 0; k < K; ++k)
        for (int e = 0; e < E; ++e) {
            int j = parked(k, e);
            if (j < 0) continue;
            double rhs = tl.movement[j][e] ? 1.0 : 0.0;
            m.add_row(strfmt("c50(%d,%d)", k + 1, e + 1), Sense::kLe, rhs,
                      {{lc[k][e], 1.0}, {ld[k][e], 1.0}});
        }
}

// (51)-(52): peak level selection; (53): hard cap on simultaneous power.
void Builder::add_peak_power_constraints() {
    if (sc.enable_peak_cost) {
        std::vector<std::pair<int, double>> pick;
        for (int v : upeak) pick.push_back({v, 1.0});
        m.add_row("c51", Sense::kEq, 1.0, std::move(pick));

        for (int e = 0; e < E; ++e) {
            std::vector<std::pair<int, double>> terms;
            for (int k = 0; k < K; ++k) {
                int j = parked(k, e);
                if (j < 0) continue;
                for (size_t n = 0; n < x[k][e].size(); ++n) {
                    const auto& c = inst.depots[j].chargers[n];
                    terms.push_back({x[k][e][n], c.charge_efficiency_frac * c.charge_power_kw});
                }
            }
            for (int j = 0; j < J; ++j) {
                terms.push_back({mu[j][e], -60.0 / dt(e)});
                terms.push_back({z[j][e], -60.0 / dt(e)});
            }
            for (size_t l = 0; l < upeak.size(); ++l)
                terms.push_back({upeak[l], -inst.peak_ladder.levels[l].power_kw});
            m.add_row(strfmt("c52(%d)", e + 1), Sense::kLe, 0.0, std::move(terms));
        }
    }

    for (int e = 0; e < E; ++e) {
        std::vector<std::pair<int, double>> terms;
        for (int k = 0; k < K; ++k) {
            int j = parked(k, e);
            if (j < 0) continue;
            for (size_t n = 0; n < x[k][e].size(); ++n) {
                const auto& c = inst.depots[j].chargers[n];
                terms.push_back({x[k][e][n], c.charge_efficiency_frac * c.charge_power_kw});
                terms.push_back(
                    {y[k][e][n], -c.discharge_power_kw / c.discharge_efficiency_frac});
            }
        }
        m.add_row(strfmt("c53(%d)", e + 1), Sense::kLe, inst.peak_ladder.hard_cap_kw,
                  std::move(terms));
    }
}

// V2G discharge is allowed only in slots fully contained in a configured
// window; with V2G disabled the whole discharge family is fixed to zero.
// ESS grid export is not window-restricted.
void Builder::restrict_discharge_windows() {
    for (int k = 0; k < K; ++k)
        for (int e = 0; e < E; ++e) {
            bool allowed = sc.enable_v2g && tl.in_discharge_window(e, sc.discharge_windows);
            if (allowed) continue;
            for (int v : y[k][e]) m.fix(v, 0.0);
            for (int v : dd[k][e]) m.fix(v, 0.0);
        }
}

}  // namespace

Model build_model(const ProblemInstance& inst, const EventTimeline& tl,
                  const ScenarioConfig& sc) {
    if (tl.num_events() == 0) throw StructuralError("build_model: timeline has no events");
    Builder b(inst, tl, sc);
    b.m.name = "ebus_" + sc.name;
    b.m.scenario_name = sc.name;
    b.m.instance_hash = inst.content_hash();
    b.create_variables();
    b.restrict_discharge_windows();
    b.add_objective();
    b.add_assignment_constraints();
    b.add_energy_balance();
    b.add_soc_bounds();
    b.add_ess_constraints();
    b.add_degradation();
    b.add_duration_linking();
    b.add_min_session_constraints();
    b.add_pv_constraints();
    b.add_session_transition_constraints();
    b.add_start_gating();
    b.add_peak_power_constraints();
    return std::move(b.m);
}

}  // namespace ebus::milp
