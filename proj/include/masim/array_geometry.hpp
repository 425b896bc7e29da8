#ifndef MASIM_ARRAY_GEOMETRY_HPP
#define MASIM_ARRAY_GEOMETRY_HPP

#include <Eigen/Dense>
#include <vector>

namespace masim
{

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = 3.14159265358979323846;

// Static description of the transmit array and the movable region.
// Lengths are in meters except region_len, which is in multiples of lambda.
struct ArrayConfig
{
    int m_t = 32;            // total transmit elements
    int u = 8;               // movable subarrays (= RF chains)
    int n_r = 2;             // receive elements per user (ULA along x)
    double lambda = kSpeedOfLight / 28.0e9;
    double d_x = 0.5 * kSpeedOfLight / 28.0e9; // intra-subarray spacing, x
    double d_z = 0.5 * kSpeedOfLight / 28.0e9; // intra-subarray spacing, z
    double l_s = 0.0;        // extra inter-subarray spacing
    double h_t = 0.0;        // base height of the first subarray
    double region_len = 12.0; // movable square side, in lambdas
    double d_min = 0.0;      // minimum subarray center distance

    int elems_per_sub() const { return m_t / u; }
    int n() const; // elements per subarray side, sqrt(m_t/u)

    // Nominal center-to-center spacing l = (n-1)*lambda/2 + l_s.
    double nominal_spacing() const { return 0.5 * (n() - 1) * lambda + l_s; }

    // Grid used to place u subarrays: ceil(sqrt(u)) columns.
    int grid_cols() const;
    int grid_rows() const;

    void validate() const; // throws std::invalid_argument on violation
};

// Axis-aligned rectangle on the x-z plane, bounds inclusive.
struct Rect
{
    double x_lo = 0, z_lo = 0, x_hi = 0, z_hi = 0;

    double width() const { return x_hi - x_lo; }
    double height() const { return z_hi - z_lo; }
    bool contains(double x, double z, double tol = 0.0) const
    {
        return x >= x_lo - tol && x <= x_hi + tol && z >= z_lo - tol && z <= z_hi + tol;
    }
    void clip(double &x, double &z) const
    {
        x = x < x_lo ? x_lo : (x > x_hi ? x_hi : x);
        z = z < z_lo ? z_lo : (z > z_hi ? z_hi : z);
    }
};

struct Position
{
    double x = 0, z = 0;
};

// Subarray placement (y = 0 throughout) plus, when assigned, the disjoint
// subregions each subarray is confined to.
struct SubarrayLayout
{
    std::vector<Position> positions;
    std::vector<Rect> subregions; // empty when positions are fixed
};

// Wave vector k(theta, phi) = [sin(t)cos(p), sin(t)sin(p), cos(t)].
Eigen::Vector3d wave_vector(double theta, double phi);

// Element-level response of one n x n subarray UPA, a_x kron a_z with 1/sqrt(n)
// factors; unit total norm.
Eigen::VectorXcd elem_response(double theta, double phi, const ArrayConfig &cfg);

// Subarray-level response: entry u is exp(j*2pi/lambda * k' * (x_u, 0, z_u)).
Eigen::VectorXcd sub_response(double theta, double phi, const SubarrayLayout &layout,
                              const ArrayConfig &cfg);

// Full transmit response a_sub kron a_elem, length m_t, squared norm u.
Eigen::VectorXcd tx_response(double theta, double phi, const SubarrayLayout &layout,
                             const ArrayConfig &cfg);

// Receive response: n_r-element half-wavelength ULA along x, unit norm.
Eigen::VectorXcd rx_response(double theta, double phi, const ArrayConfig &cfg);

// Nominal grid placement: x = ix*l, z = h_t + iz*l with l the nominal spacing.
// Throws if the grid violates d_min.
SubarrayLayout initial_layout(const ArrayConfig &cfg);

// Tiles the movable square (side region_len*lambda, centered on the nominal
// grid) into one rectangle per subarray, each shrunk by d_min/2 per side so
// any two points in distinct subregions are at least d_min apart. Throws when
// a shrunk subregion would be empty; a zero-size (single point) subregion is
// legal and pins the subarray.
std::vector<Rect> partition_regions(const ArrayConfig &cfg);

// Attaches subregions to the layout and clips each position into its own
// shrunk subregion. Starting point for movable-subarray optimization.
void assign_subregions(SubarrayLayout &layout, const ArrayConfig &cfg);

// True iff all pairwise center distances are >= d_min (boundary inclusive).
bool validate_spacing(const SubarrayLayout &layout, double d_min);

} // namespace masim

#endif
