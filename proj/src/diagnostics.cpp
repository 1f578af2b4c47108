#include "stochfrac/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stochfrac {

double PathDiagnostics::overshoot(double m_bound) const {
    double worst = 0.0;
    for (const auto& s : snapshots)
        worst = std::max({worst, s.max_u - m_bound, -s.min_u});
    return worst;
}

PathDiagnostics collect(std::uint64_t path_id,
                        std::span<const std::pair<double, LatticeFunction>> snapshots) {
    PathDiagnostics d;
    d.path_id = path_id;
    d.snapshots.reserve(snapshots.size());
    for (const auto& [t, u] : snapshots) {
        SnapshotDiagnostics s;
        s.t = t;
        s.l1 = u.l1_norm();
        s.l2 = u.l2_norm();
        s.bv = bv_seminorm(u);
        s.min_u = u.min_value();
        s.max_u = u.max_value();
        s.mass = u.mass();
        d.snapshots.push_back(s);
    }
    return d;
}

namespace {

FieldStats stats_of(std::span<const PathDiagnostics> paths, size_t snap,
                    double SnapshotDiagnostics::* field) {
    const size_t n = paths.size();
    double mean = 0.0;
    for (const auto& p : paths) mean += p.snapshots[snap].*field;
    mean /= static_cast<double>(n);
    if (n < 2) return {mean, 0.0};
    double ss = 0.0;
    for (const auto& p : paths) {
        const double d = p.snapshots[snap].*field - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace

EnsembleStats aggregate(std::span<const PathDiagnostics> paths) {
    if (paths.empty()) throw std::invalid_argument("aggregate: no paths");
    const size_t n_snaps = paths.front().snapshots.size();
    for (const auto& p : paths)
        if (p.snapshots.size() != n_snaps)
            throw std::invalid_argument("aggregate: paths disagree on snapshot count");

    EnsembleStats st;
    st.n_paths = static_cast<int>(paths.size());
    st.times.reserve(n_snaps);
    for (size_t s = 0; s < n_snaps; ++s) {
        st.times.push_back(paths.front().snapshots[s].t);
        st.l1.push_back(stats_of(paths, s, &SnapshotDiagnostics::l1));
        st.l2.push_back(stats_of(paths, s, &SnapshotDiagnostics::l2));
        st.bv.push_back(stats_of(paths, s, &SnapshotDiagnostics::bv));
        st.min_u.push_back(stats_of(paths, s, &SnapshotDiagnostics::min_u));
        st.max_u.push_back(stats_of(paths, s, &SnapshotDiagnostics::max_u));
        st.mass.push_back(stats_of(paths, s, &SnapshotDiagnostics::mass));
    }
    return st;
}

bool AprioriReport::has_fail() const {
    return std::any_of(checks.begin(), checks.end(),
                       [](const AprioriCheck& c) { return c.status == CheckStatus::fail; });
}

bool AprioriReport::has_warn() const {
    return std::any_of(checks.begin(), checks.end(),
                       [](const AprioriCheck& c) { return c.status == CheckStatus::warn; });
}

AprioriReport check_apriori(const EnsembleStats& stats, double u0_l1, double u0_bv,
                            double m_bound) {
    AprioriReport report;
    for (size_t s = 0; s < stats.times.size(); ++s) {
        const double t = stats.times[s];
        {
            AprioriCheck c;
            c.name = "L1";
            c.t = t;
            c.value = stats.l1[s].mean;
            c.bound = u0_l1 + 3.0 * stats.l1[s].se;
            c.status = c.value <= c.bound ? CheckStatus::pass : CheckStatus::fail;
            report.checks.push_back(c);
        }
        {
            AprioriCheck c;
            c.name = "BV";
            c.t = t;
            c.value = stats.bv[s].mean;
            c.bound = u0_bv + 3.0 * stats.bv[s].se;
            if (c.value <= c.bound) {
                c.status = CheckStatus::pass;
            } else {
                // The constant in the BV estimate is not quantified; retest
                // with 10% headroom and downgrade instead of failing.
                c.bound = 1.1 * u0_bv + 3.0 * stats.bv[s].se;
                c.status = c.value <= c.bound ? CheckStatus::warn : CheckStatus::fail;
            }
            report.checks.push_back(c);
        }
        report.worst_overshoot = std::max(
            {report.worst_overshoot, stats.max_u[s].mean - m_bound, -stats.min_u[s].mean});
    }
    report.worst_overshoot = std::max(report.worst_overshoot, 0.0);
    return report;
}

std::string to_string(CheckStatus status) {
    switch (status) {
        case CheckStatus::pass: return "PASS";
        case CheckStatus::warn: return "WARN";
        case CheckStatus::fail: return "FAIL";
    }
    return "?";
}

}  // namespace stochfrac
