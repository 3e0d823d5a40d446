#include "etrap/trapfields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>

#include <Eigen/Dense>

namespace etrap {

using constants::twopi;

void ElectrodeLayout::validate() const {
    if (strips.empty())
        throw contract_violation("ElectrodeLayout: no strips");
    auto sorted = strips;
    std::sort(sorted.begin(), sorted.end(),
              [](const Strip& a, const Strip& b) { return a.x_min < b.x_min; });
    for (const auto& s : sorted)
        if (!(s.x_max > s.x_min))
            throw contract_violation("ElectrodeLayout: strip width must be > 0");
    for (size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].x_min < sorted[i - 1].x_max - 1e-15)
            throw contract_violation("ElectrodeLayout: strips overlap");
}

double ElectrodeLayout::drive_frequency(ElectrodeRole role) const {
    switch (role) {
        case ElectrodeRole::RF: return drive_rf;
        case ElectrodeRole::MW: return drive_mw;
        default: return 0.0;
    }
}

std::pair<double, double> ElectrodeLayout::role_span(ElectrodeRole role) const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : strips)
        if (s.role == role) {
            lo = std::min(lo, s.x_min);
            hi = std::max(hi, s.x_max);
        }
    if (!(hi > lo))
        throw contract_violation("ElectrodeLayout: no strips with the requested role");
    return {lo, hi};
}

ElectrodeLayout five_rail_layout() {
    constexpr double um = 1e-6;
    ElectrodeLayout l;
    l.strips = {
        {-160 * um, -80 * um, 30.0, ElectrodeRole::RF},
        {-80 * um, -73 * um, 0.0, ElectrodeRole::GND},
        {-73 * um, -43 * um, 20.0, ElectrodeRole::MW},
        {-43 * um, 43 * um, 0.0, ElectrodeRole::GND},
        {43 * um, 73 * um, 20.0, ElectrodeRole::MW},
        {73 * um, 80 * um, 0.0, ElectrodeRole::GND},
        {80 * um, 160 * um, 30.0, ElectrodeRole::RF},
    };
    l.drive_rf = twopi * 40e6;
    l.drive_mw = twopi * 4e9;
    return l;
}

double strip_potential(const Strip& s, double x, double z) {
    if (z <= 0)
        throw contract_violation("strip_potential: field region is z > 0");
    return s.amplitude / constants::pi *
           (std::atan((s.x_max - x) / z) - std::atan((s.x_min - x) / z));
}

FieldVec strip_field(const ElectrodeLayout& layout, ElectrodeRole role, double x,
                     double z) {
    if (z <= 0)
        throw contract_violation("strip_field: field region is z > 0");
    if (layout.ceiling_height)
        throw contract_violation(
            "strip_field: grounded ceiling not supported by the analytic strip model; "
            "use an ingested field map");
    FieldVec f{0.0, 0.0};
    for (const auto& s : layout.strips) {
        if (s.role != role || s.amplitude == 0.0) continue;
        const double db = s.x_max - x;
        const double da = s.x_min - x;
        const double rb = z * z + db * db;
        const double ra = z * z + da * da;
        // E = -grad Phi of the atan form
        f.ex += s.amplitude / constants::pi * (z / rb - z / ra);
        f.ez += s.amplitude / constants::pi * (db / rb - da / ra);
    }
    return f;
}

double pseudopotential(double e_amp_sq, double mass, double omega_drive, double charge) {
    if (omega_drive == 0.0)
        throw divergence_error("pseudopotential: drive frequency must be nonzero");
    if (e_amp_sq < 0 || mass <= 0)
        throw contract_violation("pseudopotential: need |E|^2 >= 0 and mass > 0");
    return charge * charge * e_amp_sq / (4.0 * mass * omega_drive * omega_drive);
}

namespace {

// minimax flood: lowest water level at which the start cell connects to the
// domain boundary.
double watershed_level(const std::vector<double>& u, const std::vector<int>& shape,
                       size_t start) {
    const int ndim = static_cast<int>(shape.size());
    std::vector<size_t> stride(ndim, 1);
    for (int d = ndim - 2; d >= 0; --d)
        stride[d] = stride[d + 1] * static_cast<size_t>(shape[d + 1]);

    auto coords_of = [&](size_t idx, std::vector<int>& c) {
        for (int d = 0; d < ndim; ++d) {
            c[d] = static_cast<int>(idx / stride[d]);
            idx %= stride[d];
        }
    };
    auto on_boundary = [&](const std::vector<int>& c) {
        for (int d = 0; d < ndim; ++d)
            if (shape[d] > 1 && (c[d] == 0 || c[d] == shape[d] - 1)) return true;
        return false;
    };

    using Entry = std::pair<double, size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
    std::vector<char> seen(u.size(), 0);
    pq.push({u[start], start});
    seen[start] = 1;

    double level = u[start];
    std::vector<int> c(ndim);
    while (!pq.empty()) {
        auto [val, idx] = pq.top();
        pq.pop();
        level = std::max(level, val);
        coords_of(idx, c);
        if (on_boundary(c)) return level;
        for (int d = 0; d < ndim; ++d) {
            if (shape[d] == 1) continue;
            for (int dir = -1; dir <= 1; dir += 2) {
                int cd = c[d] + dir;
                if (cd < 0 || cd >= shape[d]) continue;
                size_t nidx = dir > 0 ? idx + stride[d] : idx - stride[d];
                if (seen[nidx]) continue;
                seen[nidx] = 1;
                pq.push({u[nidx], nidx});
            }
        }
    }
    return level; // unreachable for non-degenerate grids
}

std::string stability_note(const std::vector<double>& q) {
    for (double v : q)
        if (v > 0.4)
            return "q exceeds 0.4; pseudopotential approximation marginal";
    return "";
}

} // namespace

TrapCharacter characterize_trap(const ElectrodeLayout& layout, ElectrodeRole role,
                                const Species& species, const GridSpec& grid) {
    layout.validate();
    const double omega_drive = layout.drive_frequency(role);
    if (omega_drive <= 0)
        throw divergence_error("characterize_trap: role carries no drive frequency");
    if (grid.nx < 5 || grid.nz < 5 || !(grid.z_max > grid.z_min) || grid.z_min <= 0)
        throw contract_violation("characterize_trap: bad grid spec");

    auto [span_lo, span_hi] = layout.role_span(role);
    const double span = span_hi - span_lo;
    const double cx = 0.5 * (span_lo + span_hi);
    const double x_lo = cx - 2.0 * span;
    const double x_hi = cx + 2.0 * span;

    auto energy = [&](double x, double z) {
        return pseudopotential(strip_field(layout, role, x, z).norm2(), species.mass,
                               omega_drive, species.charge);
    };

    const double dx = (x_hi - x_lo) / (grid.nx - 1);
    const double dz = (grid.z_max - grid.z_min) / (grid.nz - 1);
    std::vector<double> u(static_cast<size_t>(grid.nx) * grid.nz);
    for (int ix = 0; ix < grid.nx; ++ix)
        for (int iz = 0; iz < grid.nz; ++iz)
            u[static_cast<size_t>(ix) * grid.nz + iz] =
                energy(x_lo + ix * dx, grid.z_min + iz * dz);

    // interior grid minimum
    size_t best = 0;
    double best_u = std::numeric_limits<double>::infinity();
    for (int ix = 1; ix + 1 < grid.nx; ++ix)
        for (int iz = 1; iz + 1 < grid.nz; ++iz) {
            size_t idx = static_cast<size_t>(ix) * grid.nz + iz;
            if (u[idx] < best_u) {
                best_u = u[idx];
                best = idx;
            }
        }

    TrapCharacter tc;
    // a boundary-adjacent "minimum" lower than every interior value means the
    // energy drains out of the window: no trap.
    double edge_min = std::numeric_limits<double>::infinity();
    for (int ix = 0; ix < grid.nx; ++ix) {
        edge_min = std::min(edge_min, u[static_cast<size_t>(ix) * grid.nz]);
        edge_min = std::min(edge_min, u[static_cast<size_t>(ix) * grid.nz + grid.nz - 1]);
    }
    for (int iz = 0; iz < grid.nz; ++iz) {
        edge_min = std::min(edge_min, u[static_cast<size_t>(iz)]);
        edge_min = std::min(edge_min, u[static_cast<size_t>(grid.nx - 1) * grid.nz + iz]);
    }
    if (edge_min <= best_u) {
        tc.found = false;
        tc.note = "no interior pseudopotential minimum on the analysis domain";
        return tc;
    }

    // local refinement: damped Newton on the analytic energy
    double mx = x_lo + static_cast<double>(best / grid.nz) * dx;
    double mz = grid.z_min + static_cast<double>(best % grid.nz) * dz;
    const double hx = 1e-3 * (x_hi - x_lo);
    const double hz = 1e-3 * (grid.z_max - grid.z_min);

    auto deriv1 = [&](double x, double z, int axis, double h) {
        auto at = [&](double s) {
            return axis == 0 ? energy(x + s, z) : energy(x, z + s);
        };
        const double d_h = (at(h) - at(-h)) / (2.0 * h);
        const double d_h2 = (at(h / 2) - at(-h / 2)) / h;
        return (4.0 * d_h2 - d_h) / 3.0;
    };
    auto hessian = [&](double x, double z) {
        auto second = [&](int axis, double h) {
            auto at = [&](double s) {
                return axis == 0 ? energy(x + s, z) : energy(x, z + s);
            };
            const double d_h = (at(h) - 2.0 * at(0) + at(-h)) / (h * h);
            const double d_h2 = (at(h / 2) - 2.0 * at(0) + at(-h / 2)) / (h * h / 4.0);
            return (4.0 * d_h2 - d_h) / 3.0;
        };
        // the two nested differencing orders give independent float paths;
        // their disagreement is the finite-difference symmetry residual
        auto cross_xz = [&](double a, double b) {
            auto val = [&](double sx, double sz) { return energy(x + sx, z + sz); };
            return ((val(a, b) - val(a, -b)) - (val(-a, b) - val(-a, -b))) /
                   (4.0 * a * b);
        };
        auto cross_zx = [&](double a, double b) {
            auto val = [&](double sx, double sz) { return energy(x + sx, z + sz); };
            return ((val(a, b) - val(-a, b)) - (val(a, -b) - val(-a, -b))) /
                   (4.0 * a * b);
        };
        Eigen::Matrix2d H;
        H(0, 0) = second(0, hx);
        H(1, 1) = second(1, hz);
        const double hxz = (4.0 * cross_xz(hx / 2, hz / 2) - cross_xz(hx, hz)) / 3.0;
        const double hzx = (4.0 * cross_zx(hx / 2, hz / 2) - cross_zx(hx, hz)) / 3.0;
        const double scale = std::max({std::abs(H(0, 0)), std::abs(H(1, 1)), std::abs(hxz)});
        if (scale > 0 && std::abs(hxz - hzx) > 1e-6 * scale)
            throw contract_violation("characterize_trap: Hessian asymmetry beyond tolerance");
        H(0, 1) = H(1, 0) = 0.5 * (hxz + hzx);
        return H;
    };

    for (int it = 0; it < 60; ++it) {
        Eigen::Vector2d g(deriv1(mx, mz, 0, hx), deriv1(mx, mz, 1, hz));
        Eigen::Matrix2d H = hessian(mx, mz);
        Eigen::Vector2d step = -H.ldlt().solve(g);
        if (!step.allFinite()) break;
        // keep the refinement inside one grid cell of the scan minimum
        const double cap = 2.0 * std::max(dx, dz);
        if (step.norm() > cap) step *= cap / step.norm();
        double nx_ = mx + step(0), nz_ = mz + step(1);
        double damp = 1.0;
        while (damp > 1e-4 && energy(nx_, nz_) > energy(mx, mz)) {
            damp *= 0.5;
            nx_ = mx + damp * step(0);
            nz_ = mz + damp * step(1);
        }
        const double moved = std::hypot(nx_ - mx, nz_ - mz);
        mx = nx_;
        mz = nz_;
        if (moved < 1e-9 * std::max(span, grid.z_max)) break;
    }

    Eigen::Matrix2d H = hessian(mx, mz);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
    if (es.eigenvalues().minCoeff() <= 0) {
        tc.found = false;
        tc.note = "stationary point is not a minimum";
        return tc;
    }

    tc.found = true;
    tc.min_position = {mx, mz};
    for (int k = 0; k < 2; ++k)
        tc.secular_omega.push_back(std::sqrt(es.eigenvalues()(k) / species.mass));
    const double u_min = energy(mx, mz);
    tc.depth = watershed_level(u, {grid.nx, grid.nz}, best) - u_min;
    for (double w : tc.secular_omega)
        tc.q.push_back(2.0 * std::sqrt(2.0) * w / omega_drive);
    tc.note = stability_note(tc.q);
    return tc;
}

namespace {

struct AxisRefine {
    double pos;     // refined coordinate
    double drop;    // energy decrease relative to the node value
    double second;  // d2U/dx2 along the axis
};

AxisRefine refine_axis(double xm, double x0, double xp, double um, double u0, double up) {
    const double dm = xm - x0;
    const double dp = xp - x0;
    const double den = dm * dm * dp - dp * dp * dm;
    AxisRefine r{x0, 0.0, 0.0};
    if (den == 0.0) return r;
    const double B = (dm * dm * (up - u0) - dp * dp * (um - u0)) / den;
    const double A = (dp * (um - u0) - dm * (up - u0)) / den;
    if (A > 0) {
        double off = -B / (2.0 * A);
        off = std::clamp(off, dm, dp);
        r.pos = x0 + off;
        r.drop = A * off * off + B * off;
        r.second = 2.0 * A;
    }
    return r;
}

} // namespace

TrapCharacter characterize_trap(const FieldMap& map, const Species& species) {
    if (map.drive_frequency <= 0)
        throw divergence_error("characterize_trap: field map carries no drive frequency");

    const std::vector<const std::vector<double>*> axes = {&map.xs, &map.ys, &map.zs};
    std::vector<int> shape = {static_cast<int>(map.xs.size()),
                              static_cast<int>(map.ys.size()),
                              static_cast<int>(map.zs.size())};
    std::vector<int> active;
    for (int d = 0; d < 3; ++d)
        if (shape[d] > 1) active.push_back(d);
    if (active.empty())
        throw contract_violation("characterize_trap: degenerate field map");
    for (int d : active)
        if (shape[d] < 3)
            throw contract_violation("characterize_trap: need >= 3 samples per active axis");

    const size_t n = map.e.size();
    std::vector<double> u(n);
    for (size_t i = 0; i < n; ++i) {
        const auto& e = map.e[i];
        u[i] = pseudopotential(e[0] * e[0] + e[1] * e[1] + e[2] * e[2], species.mass,
                               map.drive_frequency, species.charge);
    }

    std::vector<size_t> stride = {map.ys.size() * map.zs.size(), map.zs.size(), 1};
    auto coords_of = [&](size_t idx) {
        std::array<int, 3> c;
        c[0] = static_cast<int>(idx / stride[0]);
        c[1] = static_cast<int>((idx / stride[1]) % map.ys.size());
        c[2] = static_cast<int>(idx % map.zs.size());
        return c;
    };
    auto interior = [&](const std::array<int, 3>& c) {
        for (int d : active)
            if (c[d] == 0 || c[d] == shape[d] - 1) return false;
        return true;
    };

    size_t best = 0;
    double best_u = std::numeric_limits<double>::infinity();
    bool have_interior = false;
    for (size_t i = 0; i < n; ++i) {
        if (!interior(coords_of(i))) continue;
        have_interior = true;
        if (u[i] < best_u) {
            best_u = u[i];
            best = i;
        }
    }

    TrapCharacter tc;
    double edge_min = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i)
        if (!interior(coords_of(i))) edge_min = std::min(edge_min, u[i]);
    if (!have_interior || edge_min <= best_u) {
        tc.found = false;
        tc.note = "no interior pseudopotential minimum on the analysis domain";
        return tc;
    }

    const auto c0 = coords_of(best);
    const int nd = static_cast<int>(active.size());

    // per-axis parabolic refinement
    std::vector<double> pos;
    double u_min = best_u;
    std::vector<AxisRefine> ref(nd);
    for (int k = 0; k < nd; ++k) {
        const int d = active[k];
        const auto& ax = *axes[d];
        const size_t im = best - stride[d];
        const size_t ip = best + stride[d];
        ref[k] = refine_axis(ax[c0[d] - 1], ax[c0[d]], ax[c0[d] + 1], u[im], best_u, u[ip]);
        u_min += ref[k].drop;
    }

    Eigen::MatrixXd H(nd, nd);
    for (int k = 0; k < nd; ++k) H(k, k) = ref[k].second;
    for (int k = 0; k < nd; ++k)
        for (int l = k + 1; l < nd; ++l) {
            const int a = active[k], b = active[l];
            const auto& axa = *axes[a];
            const auto& axb = *axes[b];
            const double ha = axa[c0[a] + 1] - axa[c0[a] - 1];
            const double hb = axb[c0[b] + 1] - axb[c0[b] - 1];
            const double cr = (u[best + stride[a] + stride[b]] -
                               u[best + stride[a] - stride[b]] -
                               u[best - stride[a] + stride[b]] +
                               u[best - stride[a] - stride[b]]) /
                              (ha * hb);
            H(k, l) = H(l, k) = cr;
        }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.eigenvalues().minCoeff() <= 0) {
        tc.found = false;
        tc.note = "stationary point is not a minimum";
        return tc;
    }

    tc.found = true;
    // report full 3-vector position: active axes refined, singleton axes as-is
    {
        int k = 0;
        for (int d = 0; d < 3; ++d) {
            if (shape[d] > 1)
                pos.push_back(ref[k++].pos);
            else
                pos.push_back((*axes[d])[0]);
        }
    }
    tc.min_position = pos;
    for (int k = 0; k < nd; ++k)
        tc.secular_omega.push_back(std::sqrt(es.eigenvalues()(k) / species.mass));
    std::vector<int> wshape;
    for (int d = 0; d < 3; ++d) wshape.push_back(shape[d]);
    tc.depth = watershed_level(u, wshape, best) - u_min;
    for (double w : tc.secular_omega)
        tc.q.push_back(2.0 * std::sqrt(2.0) * w / map.drive_frequency);
    tc.note = stability_note(tc.q);
    return tc;
}

FieldMap ingest_field_map(const std::string& path, double drive_frequency) {
    std::ifstream is(path);
    if (!is)
        throw parse_error("cannot open field map file: " + path, 0);
    return ingest_field_map(is, drive_frequency);
}

FieldMap ingest_field_map(std::istream& is, double drive_frequency) {
    std::string line;
    long line_no = 0;
    bool header_seen = false;
    std::vector<std::array<double, 6>> rows;
    std::vector<long> row_lines;

    while (std::getline(is, line)) {
        ++line_no;
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        if (!header_seen) {
            std::string compact;
            for (char ch : line)
                if (!isspace(static_cast<unsigned char>(ch))) compact += ch;
            if (compact != "x_m,y_m,z_m,Ex_Vpm,Ey_Vpm,Ez_Vpm")
                throw parse_error("field map header must be x_m,y_m,z_m,Ex_Vpm,Ey_Vpm,Ez_Vpm",
                                  line_no);
            header_seen = true;
            continue;
        }
        std::array<double, 6> vals;
        std::stringstream ss(line);
        std::string tok;
        for (int k = 0; k < 6; ++k) {
            if (!std::getline(ss, tok, ','))
                throw parse_error("field map row needs 6 comma-separated values", line_no);
            try {
                size_t used = 0;
                vals[k] = std::stod(tok, &used);
                while (used < tok.size() && isspace(static_cast<unsigned char>(tok[used])))
                    ++used;
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw parse_error("malformed number '" + tok + "' in field map", line_no);
            }
            if (!std::isfinite(vals[k]))
                throw parse_error("non-finite field map value", line_no);
        }
        rows.push_back(vals);
        row_lines.push_back(line_no);
    }
    if (!header_seen)
        throw parse_error("field map file has no header", line_no);
    if (rows.empty())
        throw parse_error("field map file has no data rows", line_no);

    FieldMap m;
    m.drive_frequency = drive_frequency;
    // unique axis values in order of first appearance; lexicographic row
    // order then makes each axis strictly increasing
    std::vector<double> xs, ys, zs;
    for (const auto& r : rows) {
        if (std::find(xs.begin(), xs.end(), r[0]) == xs.end()) xs.push_back(r[0]);
        if (std::find(ys.begin(), ys.end(), r[1]) == ys.end()) ys.push_back(r[1]);
        if (std::find(zs.begin(), zs.end(), r[2]) == zs.end()) zs.push_back(r[2]);
    }
    for (auto* axis : {&xs, &ys, &zs})
        for (size_t i = 1; i < axis->size(); ++i)
            if ((*axis)[i] <= (*axis)[i - 1])
                throw parse_error("field map grid axis not strictly increasing "
                                  "(rows must follow lexicographic grid order)",
                                  row_lines.back());

    if (rows.size() != xs.size() * ys.size() * zs.size())
        throw parse_error("field map is not a full rectilinear grid: expected " +
                              std::to_string(xs.size() * ys.size() * zs.size()) +
                              " rows, found " + std::to_string(rows.size()),
                          row_lines.back());

    m.xs = xs;
    m.ys = ys;
    m.zs = zs;
    m.e.resize(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) {
        const size_t ix = r / (ys.size() * zs.size());
        const size_t iy = (r / zs.size()) % ys.size();
        const size_t iz = r % zs.size();
        if (rows[r][0] != xs[ix] || rows[r][1] != ys[iy] || rows[r][2] != zs[iz])
            throw parse_error("field map row out of lexicographic grid order", row_lines[r]);
        m.e[r] = {rows[r][3], rows[r][4], rows[r][5]};
    }
    int active = 0;
    for (size_t s : {xs.size(), ys.size(), zs.size()})
        if (s > 1) ++active;
    m.dimensionality = active;
    return m;
}

void write_trap_character_json(std::ostream& os, const TrapCharacter& tc) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    auto arr = [&](const std::vector<double>& v, double scale) {
        std::string s = "[";
        for (size_t i = 0; i < v.size(); ++i) {
            s += num(v[i] * scale);
            if (i + 1 < v.size()) s += ", ";
        }
        return s + "]";
    };
    std::vector<double> freq_hz;
    for (double w : tc.secular_omega) freq_hz.push_back(w / twopi);
    os << "{\n";
    os << "  \"min_position_m\": " << arr(tc.min_position, 1.0) << ",\n";
    os << "  \"secular_freq_hz\": " << arr(freq_hz, 1.0) << ",\n";
    os << "  \"depth_ev\": " << num(tc.found ? tc.depth_ev() : 0.0) << ",\n";
    os << "  \"q\": " << arr(tc.q, 1.0) << "\n";
    os << "}\n";
}

} // namespace etrap
