#ifndef ETRAP_TRAPFIELDS_HPP
#define ETRAP_TRAPFIELDS_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "etrap/constants.hpp"
#include "etrap/errors.hpp"

namespace etrap {

enum class ElectrodeRole { RF, MW, GND, DC };

/// One strip [x_min, x_max] in the gapless conducting plane z = 0, held at
/// the drive amplitude of its role (GND and DC strips carry no ac amplitude).
struct Strip {
    double x_min;
    double x_max;
    double amplitude; // V
    ElectrodeRole role;
};

struct ElectrodeLayout {
    std::vector<Strip> strips;
    double drive_rf = 0.0; // rad/s
    double drive_mw = 0.0; // rad/s
    // A grounded ceiling modifies the fields through image charges; the
    // analytic strip model does not include it, so a set value routes the
    // layout to field-map ingestion instead.
    std::optional<double> ceiling_height; // m

    void validate() const;
    double drive_frequency(ElectrodeRole role) const;
    /// Lateral extent covered by the strips that carry the role.
    std::pair<double, double> role_span(ElectrodeRole role) const;
};

/// The five-rail surface trap: a 160 um grounded center rail carrying two
/// 30 um microwave strips, flanked by 80 um rf rails. Microwave drive 20 V
/// at 4 GHz for the electron, rf drive 30 V at 40 MHz for the ion.
ElectrodeLayout five_rail_layout();

struct FieldVec {
    double ex;
    double ez;
    double norm2() const { return ex * ex + ez * ez; }
};

/// Potential of a single unit strip in the gapless plane,
/// (V/pi) [atan((b-x)/z) - atan((a-x)/z)], z > 0.
double strip_potential(const Strip& s, double x, double z);

/// Analytic in-plane field amplitude at (x, z > 0) from all strips of the
/// given drive role. Throws for z <= 0.
FieldVec strip_field(const ElectrodeLayout& layout, ElectrodeRole role, double x,
                     double z);

/// Time-averaged trapping energy q^2 |E|^2 / (4 m Omega^2) for a charge in a
/// drive field of amplitude-squared e_amp_sq at frequency Omega.
double pseudopotential(double e_amp_sq, double mass, double omega_drive, double charge);

struct Species {
    double mass;   // kg
    double charge; // C
};
inline Species electron_species() {
    return {constants::m_e, constants::e_charge};
}
inline Species be9_species() {
    return {constants::m_be9, constants::e_charge};
}

/// Sampled drive-field amplitudes on a rectilinear grid (2-D or 3-D).
struct FieldMap {
    std::vector<double> xs, ys, zs;       // strictly monotone axes (m)
    std::vector<std::array<double, 3>> e; // V/m, lexicographic (x, y, z) order
    double drive_frequency = 0.0;         // rad/s
    int dimensionality = 3;

    size_t index(size_t ix, size_t iy, size_t iz) const {
        return (ix * ys.size() + iy) * zs.size() + iz;
    }
};

/// Reads the field-map CSV (header x_m,y_m,z_m,Ex_Vpm,Ey_Vpm,Ez_Vpm, comment
/// lines starting with '#', rows in lexicographic grid order). Malformed
/// rows and non-rectilinear grids raise parse/schema errors with the line.
FieldMap ingest_field_map(const std::string& path, double drive_frequency);
FieldMap ingest_field_map(std::istream& is, double drive_frequency);

/// Result of the pseudopotential characterization. When the analysis domain
/// has no interior minimum, `found` is false and the rest is unset.
struct TrapCharacter {
    bool found = false;
    std::vector<double> min_position;   // m
    std::vector<double> secular_omega;  // rad/s per principal axis
    double depth = 0.0;                 // J
    std::vector<double> q;              // 2 sqrt(2) omega / Omega
    std::string note;                   // stability warnings etc.

    double depth_ev() const { return depth / constants::e_charge; }
};

struct GridSpec {
    int nx = 201;
    int nz = 201;
    // Window defaults: 4x the electrode span laterally, [2 um, 400 um] up.
    double z_min = 2e-6;
    double z_max = 400e-6;
};

/// Characterize the trap formed for `species` by the strips of `role`:
/// minimum by coarse scan plus local refinement, secular frequencies from
/// the Richardson-corrected Hessian, depth by watershed over the grid,
/// stability parameter per axis.
TrapCharacter characterize_trap(const ElectrodeLayout& layout, ElectrodeRole role,
                                const Species& species, const GridSpec& grid = {});

/// Same pipeline on an ingested field map.
TrapCharacter characterize_trap(const FieldMap& map, const Species& species);

/// JSON record with fields min_position_m, secular_freq_hz, depth_ev, q.
void write_trap_character_json(std::ostream& os, const TrapCharacter& tc);

} // namespace etrap

#endif
