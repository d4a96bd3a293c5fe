#include "netform/reports.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace netform {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

const char* status_name(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::blew_up: return "blew_up";
        case RunStatus::solver_failed: return "solver_failed";
    }
    return "unknown";
}

} // namespace

void write_energy_csv(const std::string& path, const EnergyReport& report) {
    std::ofstream out = open_csv(path);
    out << "tau,kinetic,diffusion,activation,metabolic,pressure,initial,work,"
           "lhs,rhs,residual\n";
    for (const EnergyTerms& r : report.rows)
        out << format_g17(r.tau) << ',' << format_g17(r.kinetic) << ','
            << format_g17(r.diffusion) << ',' << format_g17(r.activation) << ','
            << format_g17(r.metabolic) << ',' << format_g17(r.pressure) << ','
            << format_g17(r.initial) << ',' << format_g17(r.work) << ','
            << format_g17(r.lhs) << ',' << format_g17(r.rhs) << ','
            << format_g17(r.residual) << '\n';
}

void write_energy_second_csv(const std::string& path, const EnergyReport& report) {
    std::ofstream out = open_csv(path);
    out << "tau,time_derivative,diffusion,activation,pressure,metabolic,"
           "initial,lhs,rhs,residual\n";
    for (const SecondIdentityTerms& r : report.second)
        out << format_g17(r.tau) << ',' << format_g17(r.time_derivative) << ','
            << format_g17(r.diffusion) << ',' << format_g17(r.activation) << ','
            << format_g17(r.pressure) << ',' << format_g17(r.metabolic) << ','
            << format_g17(r.initial) << ',' << format_g17(r.lhs) << ','
            << format_g17(r.rhs) << ',' << format_g17(r.residual) << '\n';
}

void write_excess_csv(const std::string& path,
                      const std::vector<ExcessReport>& reports, int dim) {
    std::ofstream out = open_csv(path);
    out << (dim == 2 ? "probe,y1,y2,tau,r,m_mean_1,m_mean_2,A_r,E_r,clipped\n"
                     : "probe,y1,tau,r,m_mean_1,A_r,E_r,clipped\n");
    for (std::size_t p = 0; p < reports.size(); ++p) {
        const ExcessReport& rep = reports[p];
        for (const ExcessRow& row : rep.rows) {
            out << p << ',' << format_g17(rep.y[0]) << ',';
            if (dim == 2) out << format_g17(rep.y[1]) << ',';
            out << format_g17(rep.tau) << ',' << format_g17(row.r) << ',';
            for (double m : row.m_mean) out << format_g17(m) << ',';
            out << format_g17(row.A_r) << ',' << format_g17(row.E_r) << ','
                << (row.clipped ? 1 : 0) << '\n';
        }
    }
}

void write_oscillation_csv(const std::string& path,
                           const std::vector<OscillationReport>& reports,
                           int dim) {
    std::ofstream out = open_csv(path);
    out << (dim == 2 ? "probe,y1,y2,r,delta,beta_hat,fit_c,fit_valid\n"
                     : "probe,y1,r,delta,beta_hat,fit_c,fit_valid\n");
    for (std::size_t p = 0; p < reports.size(); ++p) {
        const OscillationReport& rep = reports[p];
        for (std::size_t i = 0; i < rep.radii.size(); ++i) {
            out << p << ',' << format_g17(rep.y[0]) << ',';
            if (dim == 2) out << format_g17(rep.y[1]) << ',';
            out << format_g17(rep.radii[i]) << ',' << format_g17(rep.delta[i])
                << ',' << format_g17(rep.beta_hat) << ',' << format_g17(rep.fit_c)
                << ',' << (rep.fit_valid ? 1 : 0) << '\n';
        }
    }
}

void write_picard_csv(const std::string& path, const PicardTrace& trace) {
    std::ofstream out = open_csv(path);
    out << "k,a_k,b_k,d_k,eta_k,ratio\n";
    for (std::size_t k = 0; k < trace.iterates(); ++k) {
        const double eta = k >= 1 ? trace.eta[k - 1]
                                  : std::numeric_limits<double>::quiet_NaN();
        const double ratio = (k >= 2 && trace.eta[k - 2] > 0.0)
                                 ? trace.eta[k - 1] / trace.eta[k - 2]
                                 : std::numeric_limits<double>::quiet_NaN();
        out << k << ',' << format_g17(trace.a[k]) << ',' << format_g17(trace.b[k])
            << ',' << format_g17(trace.d[k]) << ',' << format_g17(eta) << ','
            << format_g17(ratio) << '\n';
    }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream out = open_csv(path);
    out << "scale,smallness,survival_time,status\n";
    for (const SweepRow& r : rows)
        out << format_g17(r.scale) << ',' << format_g17(r.smallness) << ','
            << format_g17(r.survival_time) << ',' << status_name(r.status) << '\n';
}

void write_levels_csv(const std::string& path, const DeGiorgiLevels& levels,
                      int grid_dim) {
    std::ofstream out = open_csv(path);
    out << "n,k_n,y_n,ratio\n";
    const double expo = 1.0 + 2.0 / grid_dim;
    for (std::size_t n = 0; n < levels.y.size(); ++n) {
        // recursion-shaped ratio y_{n+1} / y_n^(1 + 2/N)
        double ratio = std::numeric_limits<double>::quiet_NaN();
        if (n + 1 < levels.y.size() && levels.y[n] > 0.0)
            ratio = levels.y[n + 1] / std::pow(levels.y[n], expo);
        out << n << ',' << format_g17(levels.thresholds[n]) << ','
            << format_g17(levels.y[n]) << ',' << format_g17(ratio) << '\n';
    }
}

void write_regularity_csv(const std::string& path,
                          const std::vector<ProbeRecord>& records, int dim) {
    std::ofstream out = open_csv(path);
    out << (dim == 2 ? "probe,y1,y2,tau,class,min_excess,max_mean,con1,"
                       "con1_ratio,con2,con2_ratio\n"
                     : "probe,y1,tau,class,min_excess,max_mean,con1,"
                       "con1_ratio,con2,con2_ratio\n");
    for (std::size_t p = 0; p < records.size(); ++p) {
        const ProbeRecord& r = records[p];
        out << p << ',' << format_g17(r.y[0]) << ',';
        if (dim == 2) out << format_g17(r.y[1]) << ',';
        out << format_g17(r.tau) << ','
            << (r.singular ? "singular_candidate" : "regular_candidate") << ','
            << format_g17(r.min_excess) << ',' << format_g17(r.max_mean) << ','
            << format_g17(r.con1_smallest) << ',' << format_g17(r.con1_ratio)
            << ',' << format_g17(r.con2_smallest) << ','
            << format_g17(r.con2_ratio) << '\n';
    }
}

void write_lp_csv(const std::string& path, const LpGrowthTable& table) {
    std::ofstream out = open_csv(path);
    out << "t,n,integral\n";
    for (std::size_t s = 0; s < table.times.size(); ++s)
        for (std::size_t e = 0; e < table.exponents.size(); ++e)
            out << format_g17(table.times[s]) << ',' << format_g17(table.exponents[e])
                << ',' << format_g17(table.integral[s][e]) << '\n';
}

} // namespace netform
