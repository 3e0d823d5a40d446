#include "etrap/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

namespace etrap {

void SpectrumTrace::validate() const {
    if (f.size() != s.size())
        throw contract_violation("SpectrumTrace: frequency/magnitude size mismatch");
    if (f.size() < 16)
        throw contract_violation("SpectrumTrace: need at least 16 samples");
    for (size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i]) || !std::isfinite(s[i]))
            throw contract_violation("SpectrumTrace: non-finite sample");
        if (i > 0 && f[i] <= f[i - 1])
            throw contract_violation("SpectrumTrace: frequencies must be strictly increasing");
    }
}

SpectrumTrace SpectrumTrace::to_linear() const {
    if (!is_db) return *this;
    SpectrumTrace out;
    out.f = f;
    out.is_db = false;
    out.s.reserve(s.size());
    for (double v : s) out.s.push_back(std::pow(10.0, v / 10.0));
    return out;
}

SpectrumTrace read_trace_csv(std::istream& is) {
    SpectrumTrace t;
    std::string line;
    long line_no = 0;
    bool units_seen = false;
    while (std::getline(is, line)) {
        ++line_no;
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            std::string compact;
            for (char ch : line)
                if (!isspace(static_cast<unsigned char>(ch))) compact += ch;
            if (compact.rfind("#units=", 0) == 0) {
                std::string u = compact.substr(7);
                if (u == "db")
                    t.is_db = true;
                else if (u == "linear")
                    t.is_db = false;
                else
                    throw parse_error("trace units must be db or linear, got '" + u + "'",
                                      line_no);
                units_seen = true;
            }
            continue;
        }
        if (line.find("freq_hz") != std::string::npos) continue; // column header
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw parse_error("trace row needs freq_hz, mag", line_no);
        try {
            t.f.push_back(std::stod(a));
            t.s.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw parse_error("malformed trace row", line_no);
        }
    }
    if (!units_seen) t.is_db = false;
    t.validate();
    return t;
}

SpectrumTrace read_trace_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw parse_error("cannot open trace file: " + path, 0);
    return read_trace_csv(is);
}

namespace {

struct Model {
    // y = B + P * (k/2)^2 / ((f - f0)^2 + (k/2)^2)
    static double eval(double f, const Eigen::Vector4d& p) {
        const double f0 = p(0), k = p(1), P = p(2), B = p(3);
        const double hk2 = 0.25 * k * k;
        return B + P * hk2 / ((f - f0) * (f - f0) + hk2);
    }
    static Eigen::Vector4d jac(double f, const Eigen::Vector4d& p) {
        const double f0 = p(0), k = p(1), P = p(2);
        const double d = f - f0;
        const double hk2 = 0.25 * k * k;
        const double D = d * d + hk2;
        Eigen::Vector4d g;
        g(0) = P * hk2 * 2.0 * d / (D * D);
        g(1) = P * 0.5 * k * d * d / (D * D);
        g(2) = hk2 / D;
        g(3) = 1.0;
        return g;
    }
};

LorentzianSeed auto_seed(const SpectrumTrace& t) {
    const size_t n = t.f.size();
    size_t imax = 0;
    for (size_t i = 1; i < n; ++i)
        if (t.s[i] > t.s[imax]) imax = i;
    const double base = *std::min_element(t.s.begin(), t.s.end());
    const double peak = t.s[imax] - base;
    const double half = base + 0.5 * peak;

    double f_lo = t.f.front(), f_hi = t.f.back();
    for (size_t i = imax; i-- > 0;)
        if (t.s[i] < half) {
            f_lo = t.f[i];
            break;
        }
    for (size_t i = imax + 1; i < n; ++i)
        if (t.s[i] < half) {
            f_hi = t.f[i];
            break;
        }
    double kappa = f_hi - f_lo;
    if (kappa <= 0) kappa = (t.f.back() - t.f.front()) / 4.0;
    return {t.f[imax], kappa, peak, base};
}

} // namespace

LorentzianFit fit_lorentzian(const SpectrumTrace& trace, std::optional<LorentzianSeed> seed) {
    trace.validate();
    const SpectrumTrace t = trace.to_linear();
    const size_t n = t.f.size();

    LorentzianSeed s0 = seed ? *seed : auto_seed(t);
    Eigen::Vector4d p(s0.f0, s0.kappa, s0.peak, s0.baseline);

    double lambda = 1e-3;
    bool converged = false;
    int it = 0;
    for (; it < 200; ++it) {
        Eigen::Matrix4d JtJ = Eigen::Matrix4d::Zero();
        Eigen::Vector4d Jtr = Eigen::Vector4d::Zero();
        for (size_t i = 0; i < n; ++i) {
            const double r = Model::eval(t.f[i], p) - t.s[i];
            const Eigen::Vector4d g = Model::jac(t.f[i], p);
            JtJ += g * g.transpose();
            Jtr += g * r;
        }
        Eigen::Matrix4d A = JtJ;
        for (int k = 0; k < 4; ++k) A(k, k) += lambda * std::max(JtJ(k, k), 1e-300);
        Eigen::Vector4d step = A.ldlt().solve(-Jtr);
        if (!step.allFinite())
            throw fit_error("fit_lorentzian: singular normal equations (no peak?)");

        auto cost = [&](const Eigen::Vector4d& q) {
            double c = 0;
            for (size_t i = 0; i < n; ++i) {
                const double r = Model::eval(t.f[i], q) - t.s[i];
                c += r * r;
            }
            return c;
        };
        const double c_old = cost(p);
        Eigen::Vector4d p_new = p + step;
        p_new(1) = std::abs(p_new(1));
        if (cost(p_new) <= c_old) {
            lambda = std::max(lambda * 0.3, 1e-12);
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) {
                char msg[256];
                std::snprintf(msg, sizeof msg,
                              "fit_lorentzian: no convergence; last iterate f0=%.6g "
                              "kappa=%.6g peak=%.6g baseline=%.6g",
                              p(0), p(1), p(2), p(3));
                throw fit_error(msg);
            }
            continue;
        }

        double rel = 0;
        for (int k = 0; k < 4; ++k) {
            const double scale = std::max(std::abs(p_new(k)), 1e-300);
            rel = std::max(rel, std::abs(p_new(k) - p(k)) / scale);
        }
        p = p_new;
        if (rel < 1e-8) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        char msg[256];
        std::snprintf(msg, sizeof msg,
                      "fit_lorentzian: no convergence after 200 iterations; last iterate "
                      "f0=%.6g kappa=%.6g peak=%.6g baseline=%.6g",
                      p(0), p(1), p(2), p(3));
        throw fit_error(msg);
    }

    const double f0 = p(0), kappa = p(1), peak = p(2), base = p(3);

    double ss = 0;
    for (size_t i = 0; i < n; ++i) {
        const double r = Model::eval(t.f[i], p) - t.s[i];
        ss += r * r;
    }
    const double rms = std::sqrt(ss / n);

    if (!(peak > 0) || peak <= 3.0 * rms)
        throw fit_error("fit_lorentzian: no significant peak in trace");
    if (f0 < t.f.front() || f0 > t.f.back())
        throw fit_error("fit_lorentzian: fitted peak outside the trace span");
    if (!(kappa > 0) || kappa > 10.0 * (t.f.back() - t.f.front()))
        throw fit_error("fit_lorentzian: unphysical linewidth");

    // symmetric two-port split: |S21(f0)| = kappa_ext / kappa_tot
    const double depth = std::sqrt(peak);
    if (depth >= 1.0)
        throw fit_error("fit_lorentzian: on-resonance transmission >= 1, cannot split Q");

    LorentzianFit fit;
    fit.f0 = f0;
    fit.kappa_tot = kappa;
    fit.q_tot = f0 / kappa;
    const double kappa_ext = depth * kappa;
    const double kappa_int = kappa - kappa_ext;
    fit.q_ext = f0 / kappa_ext;
    fit.q_int = f0 / kappa_int;
    fit.amplitude = peak;
    fit.baseline = base;
    fit.residual_rms = rms;
    fit.iterations = it + 1;
    fit.span_warning = (t.f.back() - t.f.front()) < 3.0 * kappa;
    fit.boundary_warning =
        (f0 - t.f.front()) < kappa || (t.f.back() - f0) < kappa;

    // covariance diagnostics from the converged normal equations
    Eigen::Matrix4d JtJ = Eigen::Matrix4d::Zero();
    for (size_t i = 0; i < n; ++i) {
        const Eigen::Vector4d g = Model::jac(t.f[i], p);
        JtJ += g * g.transpose();
    }
    Eigen::Matrix4d cov = JtJ.inverse() * (ss / std::max<double>(1, n - 4));
    fit.stderr_f0 = std::sqrt(std::max(0.0, cov(0, 0)));
    fit.stderr_kappa = std::sqrt(std::max(0.0, cov(1, 1)));
    return fit;
}

void write_fit_json(std::ostream& os, const LorentzianFit& fit) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    os << "{\n";
    os << "  \"f0_hz\": " << num(fit.f0) << ",\n";
    os << "  \"q_tot\": " << num(fit.q_tot) << ",\n";
    os << "  \"q_int\": " << num(fit.q_int) << ",\n";
    os << "  \"q_ext\": " << num(fit.q_ext) << ",\n";
    os << "  \"kappa_hz\": " << num(fit.kappa_tot) << ",\n";
    os << "  \"residual_rms\": " << num(fit.residual_rms) << "\n";
    os << "}\n";
}

std::vector<ModePeak> find_modes(const SpectrumTrace& trace, double threshold,
                                 std::optional<double> base_frequency) {
    trace.validate();
    const SpectrumTrace t = trace; // thresholds are in trace units; no conversion
    const size_t n = t.f.size();

    std::vector<size_t> maxima;
    for (size_t i = 1; i + 1 < n; ++i)
        if (t.s[i] > t.s[i - 1] && t.s[i] >= t.s[i + 1] && t.s[i] > threshold)
            maxima.push_back(i);

    std::vector<ModePeak> peaks;
    for (size_t idx : maxima) {
        // prominence: height above the higher of the two valleys separating
        // this peak from the nearest higher ground
        double left_valley = t.s[idx];
        for (size_t i = idx; i-- > 0;) {
            left_valley = std::min(left_valley, t.s[i]);
            if (t.s[i] > t.s[idx]) break;
        }
        double right_valley = t.s[idx];
        for (size_t i = idx + 1; i < n; ++i) {
            right_valley = std::min(right_valley, t.s[i]);
            if (t.s[i] > t.s[idx]) break;
        }
        ModePeak pk;
        pk.freq = t.f[idx];
        pk.height = t.s[idx];
        pk.prominence = t.s[idx] - std::max(left_valley, right_valley);
        pk.harmonic_index = 0;
        peaks.push_back(pk);
    }
    if (peaks.empty()) return peaks;

    const double base = base_frequency
                            ? *base_frequency
                            : std::min_element(peaks.begin(), peaks.end(),
                                               [](const ModePeak& a, const ModePeak& b) {
                                                   return a.freq < b.freq;
                                               })
                                  ->freq;
    for (auto& pk : peaks) {
        const double n_guess = (pk.freq / base - 1.0) / 2.0;
        pk.harmonic_index = std::max(0, static_cast<int>(std::lround(n_guess)));
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const ModePeak& a, const ModePeak& b) {
        return a.prominence > b.prominence;
    });
    return peaks;
}

} // namespace etrap
