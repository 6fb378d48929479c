#include <doctest.h>

#include <random>

#include "sesim/dws.hpp"

using namespace sesim;

namespace {
Prosumer series_prosumer(std::vector<double> pv, std::vector<double> demand,
                         double pow_kw = 7.5) {
    Prosumer p;
    p.id = 0;
    p.pv_peak_kw = 10.0;
    p.ess_capacity_kwh = 15.0;
    p.ess_power_kw = pow_kw;
    p.pv_series = std::move(pv);
    p.demand_series = std::move(demand);
    return p;
}
}  // namespace

TEST_CASE("hourly flows: surplus deposits, deficits withdraw on positive credit") {
    Prosumer p = series_prosumer({5.0, 2.0, 2.0, 20.0}, {2.0, 5.0, 5.0, 2.0});
    auto [d0, w0] = prosumer_flows(p, 0, 0.0);
    CHECK(d0 == doctest::Approx(3.0));
    CHECK(w0 == 0.0);

    auto [d1, w1] = prosumer_flows(p, 1, 1.0);
    CHECK(d1 == 0.0);
    CHECK(w1 == doctest::Approx(3.0));

    // no credit, no withdrawal
    auto [d2, w2] = prosumer_flows(p, 2, 0.0);
    CHECK(d2 == 0.0);
    CHECK(w2 == 0.0);

    // power rating caps the deposit
    auto [d3, w3] = prosumer_flows(p, 3, 0.0);
    CHECK(d3 == doctest::Approx(7.5));
    CHECK(w3 == 0.0);

    // rating caps the withdrawal too
    Prosumer q = series_prosumer({0.0}, {20.0}, 4.0);
    auto [d4, w4] = prosumer_flows(q, 0, 5.0);
    CHECK(d4 == 0.0);
    CHECK(w4 == doctest::Approx(4.0));
}

TEST_CASE("credit accrual under the admission efficiency") {
    SesConfig cfg;
    CreditLedger ledger(2);
    HourFlows flows(2);
    flows.deposit[0] = 2.0;
    flows.withdraw[1] = 1.0;
    ledger.credit[1] = 2.0;
    DwsCoefficients coeffs{1.2, 0.9, 0.0, 0.0};
    update_credit(ledger, flows, coeffs, cfg);
    CHECK(ledger.credit[0] == doctest::Approx(2.0 * 1.2 * (0.95 / 1.05)));  // 2.1714...
    CHECK(ledger.credit[0] == doctest::Approx(2.1714).epsilon(1e-4));
    CHECK(ledger.credit[1] == doctest::Approx(2.0 - 0.9 * 1.0));  // 1.1

    // routing makes no difference to the credit: virtual flags are ignored
    CreditLedger ledger2(2);
    ledger2.credit[1] = 2.0;
    HourFlows virt = flows;
    virt.v_deposit[0] = 2.0;
    virt.v_withdraw[1] = 1.0;
    update_credit(ledger2, virt, coeffs, cfg);
    CHECK(ledger2.credit[0] == doctest::Approx(ledger.credit[0]));
    CHECK(ledger2.credit[1] == doctest::Approx(ledger.credit[1]));
}

TEST_CASE("credit can run negative within the day; coefficients are bounded") {
    SesConfig cfg;
    CreditLedger ledger(1);
    HourFlows flows(1);
    flows.withdraw[0] = 3.0;
    update_credit(ledger, flows, {1.0, 1.0, 0.0, 0.0}, cfg);
    CHECK(ledger.credit[0] == doctest::Approx(-3.0));

    CHECK_THROWS_AS(update_credit(ledger, flows, {0.9, 1.0, 0.0, 0.0}, cfg),
                    ContractViolation);
    CHECK_THROWS_AS(update_credit(ledger, flows, {2.0, 1.0, 0.0, 0.0}, cfg),
                    ContractViolation);
    CHECK_THROWS_AS(update_credit(ledger, flows, {1.0, 1.1, 0.0, 0.0}, cfg),
                    ContractViolation);
    CHECK_THROWS_AS(update_credit(ledger, flows, {1.0, 0.4, 0.0, 0.0}, cfg),
                    ContractViolation);
}

TEST_CASE("factor triple: balance, fill level, price edge") {
    SesState ses;
    ses.capacity_kwh = 30.0;
    ses.energy_kwh = 30.0;
    ses.max_charge_kw = 15.0;
    ses.max_discharge_kw = 15.0;

    Tariffs tariffs;
    tariffs.tou_price.assign(24, 0.25);
    tariffs.spot_series.assign(48, 0.1);

    AoWindow ao(720);
    HourFlows flows(2);
    flows.deposit[0] = 3.0;
    flows.withdraw[1] = 3.0;

    Factors f = compute_factors(ses, flows, tariffs, 0, ao);
    CHECK(f.raw_sdr == doctest::Approx(0.0));
    CHECK(f.f_sdr == doctest::Approx(0.5));
    CHECK(f.f_soc == doctest::Approx(1.0));
    CHECK(f.raw_ao == doctest::Approx(0.0));  // flat prices: no edge
    CHECK(f.f_ao == doctest::Approx(0.5));    // degenerate window

    // one-sided deposits push the balance factor up
    HourFlows dep(2);
    dep.deposit[0] = 15.0;
    Factors g = compute_factors(ses, dep, tariffs, 1, ao);
    CHECK(g.raw_sdr == doctest::Approx(1.0));
    CHECK(g.f_sdr == doctest::Approx(1.0));

    SesState broken;
    CHECK_THROWS_AS(compute_factors(broken, flows, tariffs, 0, ao), ConfigError);
}

TEST_CASE("arbitrage window normalizes over its trailing history") {
    AoWindow ao(4);
    CHECK(ao.normalize(0.1) == doctest::Approx(0.5));   // single point: degenerate
    CHECK(ao.normalize(0.3) == doctest::Approx(1.0));   // new max
    CHECK(ao.normalize(0.1) == doctest::Approx(0.0));   // back at the window min
    CHECK(ao.normalize(0.2) == doctest::Approx(0.5));   // midpoint
    // window length 4: the first 0.1 falls out after this insert
    CHECK(ao.normalize(0.5) == doctest::Approx(1.0));
    CHECK(ao.normalize(0.4) == doctest::Approx((0.4 - 0.1) / (0.5 - 0.1)));
}

TEST_CASE("virtual routing is all-or-nothing per direction") {
    SesConfig cfg;  // UP = 0.9/0.9/0.85, LOW = 0.1/0.1/0.15
    HourFlows flows(2);
    flows.deposit[0] = 2.0;
    flows.withdraw[1] = 1.0;

    Factors mid{0.5, 0.5, 0.5, 0.0, 0.0};
    auto [s0, e0] = route_virtual(flows, mid, cfg);
    CHECK_FALSE(s0);
    CHECK_FALSE(e0);
    CHECK(flows.virtual_deposit() == 0.0);
    CHECK(flows.virtual_withdraw() == 0.0);

    Factors full = mid;
    full.f_soc = 0.95;  // nearly full: deposits go to the wholesale market
    auto [s1, e1] = route_virtual(flows, full, cfg);
    CHECK(s1);
    CHECK_FALSE(e1);
    CHECK(flows.v_deposit[0] == doctest::Approx(2.0));
    CHECK(flows.v_withdraw[1] == 0.0);

    Factors empty = mid;
    empty.f_soc = 0.05;  // nearly empty: withdrawals are sourced from the market
    auto [s2, e2] = route_virtual(flows, empty, cfg);
    CHECK_FALSE(s2);
    CHECK(e2);
    CHECK(flows.v_deposit[0] == 0.0);
    CHECK(flows.v_withdraw[1] == doctest::Approx(1.0));

    // thresholds are strict: sitting exactly on them does not trigger
    Factors edge{cfg.beta_sdr_up, cfg.beta_soc_up, cfg.beta_ao_up, 0.0, 0.0};
    auto [s3, e3] = route_virtual(flows, edge, cfg);
    CHECK_FALSE(s3);
    CHECK_FALSE(e3);
}

TEST_CASE("day-end settlement prices and resets the credits") {
    SesConfig cfg;  // beta_fit 0.8, beta_tou 1.2
    Tariffs tariffs;
    tariffs.fit_price = 0.10;

    CreditLedger ledger(3);
    ledger.credit = {2.0, -1.0, 0.0};
    DaySettlement s = settle_day(ledger, 0.30, tariffs, cfg);

    CHECK(s.ses_cost == doctest::Approx(2.0 * 0.8 * 0.10));      // 0.16 buying out credit
    CHECK(s.ses_revenue == doctest::Approx(1.0 * 1.2 * 0.30));   // 0.36 charged for debt
    CHECK(s.prosumer_revenue[0] == doctest::Approx(0.16));
    CHECK(s.prosumer_cost[1] == doctest::Approx(0.36));
    CHECK(s.prosumer_revenue[2] == 0.0);
    CHECK(s.prosumer_cost[2] == 0.0);
    for (double c : ledger.credit) CHECK(c == 0.0);

    // mirror entries: one per nonzero balance, settlement-side signs
    REQUIRE(ledger.day_settlements.size() == 2);
    CHECK(ledger.day_settlements[0].amount == doctest::Approx(0.16));
    CHECK(ledger.day_settlements[1].amount == doctest::Approx(-0.36));
}

TEST_CASE("settlement transfers net to zero across the two sides") {
    SesConfig cfg;
    Tariffs tariffs;
    tariffs.fit_price = 0.07;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int rep = 0; rep < 50; ++rep) {
        CreditLedger ledger(7);
        for (double& c : ledger.credit) c = u(rng);
        DaySettlement s = settle_day(ledger, 0.22, tariffs, cfg);
        double prosumer_net = 0.0;
        for (std::size_t j = 0; j < 7; ++j) prosumer_net += s.prosumer_revenue[j] - s.prosumer_cost[j];
        CHECK(prosumer_net == doctest::Approx(s.ses_cost - s.ses_revenue).epsilon(1e-12));
    }
}

TEST_CASE("demand-weighted daily mean TOU") {
    Tariffs tariffs;
    tariffs.tou_price.assign(24, 0.2);
    tariffs.tou_price[10] = 0.6;

    Prosumer p = series_prosumer(std::vector<double>(24, 0.0), std::vector<double>(24, 0.0));
    p.demand_series[10] = 2.0;  // all demand at the expensive hour
    std::vector<const Prosumer*> ps{&p};
    CHECK(day_mean_tou(tariffs, ps, 0) == doctest::Approx(0.6));

    Prosumer q = series_prosumer(std::vector<double>(24, 0.0), std::vector<double>(24, 1.0));
    std::vector<const Prosumer*> qs{&q};
    const double flat_mean = (0.2 * 23 + 0.6) / 24.0;
    CHECK(day_mean_tou(tariffs, qs, 0) == doctest::Approx(flat_mean));

    // zero-demand day falls back to the unweighted mean
    CHECK(day_mean_tou(tariffs, ps, 0) == doctest::Approx(0.6));
    Prosumer z = series_prosumer(std::vector<double>(24, 0.0), std::vector<double>(24, 0.0));
    std::vector<const Prosumer*> zs{&z};
    CHECK(day_mean_tou(tariffs, zs, 0) == doctest::Approx(flat_mean));
}

TEST_CASE("electricity-gain index of a coefficient history") {
    CHECK(deposit_withdraw_gain({{1.2, 0.9, 0, 0}}) == doctest::Approx(1.2 / 0.9));
    CHECK(deposit_withdraw_gain({{1.2, 0.9, 0, 0}}) == doctest::Approx(1.3333).epsilon(1e-4));
    CHECK(deposit_withdraw_gain({{1.0, 1.0, 0, 0}, {1.0, 1.0, 0, 0}}) == doctest::Approx(1.0));
    CHECK(deposit_withdraw_gain({{1.5, 0.5, 0, 0}, {1.0, 1.0, 0, 0}}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(deposit_withdraw_gain({}), ConfigError);
    CHECK_THROWS_AS(deposit_withdraw_gain({{1.0, 0.0, 0, 0}}), ContractViolation);
}

TEST_CASE("gain index is at least 1 whenever coefficients stay in bounds") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ud(1.0, 1.5), uw(0.5, 1.0);
    std::vector<DwsCoefficients> hist;
    for (int i = 0; i < 200; ++i) hist.push_back({ud(rng), uw(rng), 0.0, 0.0});
    CHECK(deposit_withdraw_gain(hist) >= 1.0);
}

TEST_CASE("incremental credit accrual matches a batch recomputation") {
    SesConfig cfg;
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uf(0.0, 7.5), ud(1.0, 1.5), uw(0.5, 1.0),
        ucoin(0.0, 1.0);

    const std::size_t n = 6;
    CreditLedger ledger(n);
    std::vector<HourFlows> all_flows;
    std::vector<DwsCoefficients> all_coeffs;
    for (int h = 0; h < 24; ++h) {
        HourFlows flows(n);
        for (std::size_t j = 0; j < n; ++j) {
            if (ucoin(rng) < 0.5)
                flows.deposit[j] = uf(rng);
            else
                flows.withdraw[j] = uf(rng);
        }
        DwsCoefficients coeffs{ud(rng), uw(rng), 0.0, 0.0};
        update_credit(ledger, flows, coeffs, cfg);
        all_flows.push_back(flows);
        all_coeffs.push_back(coeffs);
    }
    for (std::size_t j = 0; j < n; ++j) {
        double gamma = 0.0;
        for (int h = 0; h < 24; ++h)
            gamma += (all_coeffs[h].alpha_dps * all_flows[h].deposit[j] * cfg.eta_adm() -
                      all_coeffs[h].alpha_wtd * all_flows[h].withdraw[j]) *
                     kDtHours;
        CHECK(ledger.credit[j] == doctest::Approx(gamma).epsilon(1e-12));
    }
}
