#include "stochfrac/report_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace stochfrac {

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string provenance_line(std::uint64_t config_hash, std::uint64_t seed) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "# stochfrac %s config=%016llx seed=%llu",
                  std::string(kVersion).c_str(),
                  static_cast<unsigned long long>(config_hash),
                  static_cast<unsigned long long>(seed));
    return buf;
}

void write_rate_report_csv(std::ostream& out, const RateReport& report) {
    out << provenance_line(report.config_hash, report.seed) << '\n';
    out << "lambda,dx,error,se,rate\n";
    for (const auto& row : report.rows) {
        out << format_double(report.lambda) << ',' << format_double(row.dx) << ','
            << format_double(row.error) << ',' << format_double(row.se) << ',';
        if (row.rate) out << format_double(*row.rate);
        out << '\n';
    }
}

std::string rate_report_table(const RateReport& report) {
    std::ostringstream out;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "lambda = %g   (%d paths, %d aborted)\n", report.lambda,
                  report.n_paths, report.n_aborted);
    out << buf;
    out << "     dx          Error        Rate\n";
    for (const auto& row : report.rows) {
        if (row.rate)
            std::snprintf(buf, sizeof(buf), "  %10.4e  %10.4e  %6.2f\n", row.dx, row.error,
                          *row.rate);
        else
            std::snprintf(buf, sizeof(buf), "  %10.4e  %10.4e     -\n", row.dx, row.error);
        out << buf;
    }
    return out.str();
}

void write_kernel_csv(std::ostream& out, const WeightKernel& kernel, std::uint64_t seed) {
    std::ostringstream meta;
    meta << "lambda=" << format_double(kernel.lambda()) << "\ndx=" << format_double(kernel.dx())
         << "\nimax=" << kernel.i_max() << '\n';
    out << provenance_line(fnv1a64(meta.str()), seed) << '\n';
    out << "i,G_i\n";
    for (int i = 0; i <= kernel.i_max(); ++i)
        out << i << ',' << format_double(kernel[i]) << '\n';
}

void write_profile_csv(std::ostream& out, const LatticeFunction& u, std::uint64_t config_hash,
                       std::uint64_t seed) {
    out << provenance_line(config_hash, seed) << '\n';
    out << "x,u\n";
    for (int i = -u.k(); i <= u.k(); ++i)
        out << format_double(u.grid().center(i)) << ',' << format_double(u[i]) << '\n';
}

void write_apriori_csv(std::ostream& out, const AprioriStudyResult& result,
                       std::uint64_t config_hash, std::uint64_t seed) {
    out << provenance_line(config_hash, seed) << '\n';
    out << "dt,dx,t,check,value,bound,status\n";
    for (const auto& level : result.levels) {
        for (const auto& c : level.report.checks)
            out << format_double(level.level.dt) << ',' << format_double(level.level.dx) << ','
                << format_double(c.t) << ',' << c.name << ',' << format_double(c.value) << ','
                << format_double(c.bound) << ',' << to_string(c.status) << '\n';
        out << format_double(level.level.dt) << ',' << format_double(level.level.dx)
            << ",,overshoot," << format_double(level.overshoot.mean) << ','
            << format_double(level.overshoot.se) << ",REPORT\n";
    }
}

std::string apriori_text(const AprioriStudyResult& result) {
    std::ostringstream out;
    char buf[160];
    for (const auto& level : result.levels) {
        std::snprintf(buf, sizeof(buf), "level dt=%g dx=%g  (|u0|_L1=%.6g, |u0|_BV=%.6g)\n",
                      level.level.dt, level.level.dx, level.u0_l1, level.u0_bv);
        out << buf;
        for (const auto& c : level.report.checks) {
            std::snprintf(buf, sizeof(buf), "  [%s] %-3s t=%-5g value=%.8g bound=%.8g\n",
                          to_string(c.status).c_str(), c.name.c_str(), c.t, c.value, c.bound);
            out << buf;
        }
        std::snprintf(buf, sizeof(buf),
                      "  overshoot beyond [0,M]: mean=%.3e se=%.3e (worst snapshot mean %.3e)\n",
                      level.overshoot.mean, level.overshoot.se, level.report.worst_overshoot);
        out << buf;
    }
    out << (result.overshoot_monotone
                ? "overshoot decreases with dt (within 2 SE): yes\n"
                : "overshoot decreases with dt (within 2 SE): NO\n");
    return out.str();
}

std::map<std::string, std::string> parse_config_file(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "config line " << line_no << ": expected key = value, got '" << stripped << "'";
            throw std::invalid_argument(msg.str());
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            std::ostringstream msg;
            msg << "config line " << line_no << ": empty key";
            throw std::invalid_argument(msg.str());
        }
        kv[key] = value;
    }
    return kv;
}

}  // namespace stochfrac
