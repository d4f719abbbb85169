#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace subfrac {

// Exponential coordinates; shipped groups have topological dimension <= 3.
using Coords = std::array<double, 3>;

enum class GroupKind { euclidean, heisenberg };

// A stratified group realized on R^n with a polynomial law, dilations
// delta_lambda(x)_j = lambda^{d_j} x_j and homogeneous dimension Q = sum d_j.
class CarnotGroup {
public:
    static CarnotGroup euclidean(int n);  // (R^n, +), n in {1,2,3}
    static CarnotGroup heisenberg();      // H^1 with the 1/2-skew law
    static CarnotGroup fromId(const std::string& id);  // "r1","r2","r3","h1"

    const std::string& name() const { return name_; }
    GroupKind kind() const { return kind_; }
    int dim() const { return n_; }
    int horizontalDim() const { return m_; }
    int weight(int j) const { return weights_[j]; }
    int homogeneousDim() const { return q_; }
    Coords identity() const { return Coords{0.0, 0.0, 0.0}; }

    Coords compose(const Coords& a, const Coords& b) const;
    Coords invert(const Coords& a) const;
    Coords dilate(double lambda, const Coords& a) const;  // throws on lambda <= 0
    // Plane rotation of the first two horizontal coordinates; vertical
    // coordinates are untouched. Throws for theta != 0 when m < 2.
    Coords horizontalRotate(double theta, const Coords& a) const;

    bool operator==(const CarnotGroup& o) const { return name_ == o.name_; }

private:
    CarnotGroup() = default;
    std::string name_;
    GroupKind kind_ = GroupKind::euclidean;
    int n_ = 0, m_ = 0, q_ = 0;
    std::array<int, 3> weights_{1, 1, 1};
};

// A point tagged with its group; the checked API validates membership.
struct GroupPoint {
    Coords coords{};
    const CarnotGroup* group = nullptr;
};

GroupPoint compose(const CarnotGroup& g, const GroupPoint& x, const GroupPoint& y);
GroupPoint invert(const CarnotGroup& g, const GroupPoint& x);
GroupPoint dilate(const CarnotGroup& g, double lambda, const GroupPoint& x);
GroupPoint horizontalRotate(const CarnotGroup& g, double theta, const GroupPoint& x);

enum class GaugeKind { euclidean, koranyi };
enum class AxiomStatus { declared, empirically_validated, unknown };

struct GaugeFlags {
    AxiomStatus symmetric = AxiomStatus::declared;
    AxiomStatus homogeneous = AxiomStatus::declared;
    AxiomStatus triangle = AxiomStatus::unknown;
    AxiomStatus horizontally_rotation_invariant = AxiomStatus::declared;
};

// Homogeneous norm. Euclidean kind is valid on the Abelian instances only;
// the Koranyi gauge ((x^2+y^2)^2 + 16 t^2)^{1/4} is the H^1 instance and
// degenerates to the Euclidean norm on R^n.
class HomogeneousGauge {
public:
    static HomogeneousGauge make(GaugeKind kind, const CarnotGroup& g);
    static HomogeneousGauge fromId(const std::string& id, const CarnotGroup& g);

    double operator()(const Coords& x) const;
    double operator()(const GroupPoint& x) const;  // checked

    GaugeKind kind() const { return kind_; }
    const CarnotGroup& group() const { return group_; }
    const GaugeFlags& flags() const { return flags_; }
    GaugeFlags& flags() { return flags_; }
    std::string key() const;  // e.g. "h1/koranyi"

    // Per-coordinate halfwidths of the unit ball {gauge <= 1}; a radius-r
    // ball fits the box with halfwidth_j * r^{d_j}.
    Coords unitBallHalfwidths() const;

private:
    HomogeneousGauge(GaugeKind k, const CarnotGroup& g) : kind_(k), group_(g) {}
    GaugeKind kind_;
    CarnotGroup group_;
    GaugeFlags flags_;
};

struct GroupLawReport {
    double identityDev = 0;
    double inverseDev = 0;
    double associativityDev = 0;
    double dilationDev = 0;  // automorphism property
    std::size_t samples = 0;
    double maxDeviation() const;
};

struct GaugeAxiomReport {
    double zeroAtIdentity = 0;      // gauge(0)
    double symmetryDev = 0;         // axiom (ii)
    double homogeneityDev = 0;      // axiom (iii)
    double rotationDev = 0;         // axiom (iv)
    double triangleDev = 0;         // axiom (v), both sides
    std::size_t samples = 0;
    double maxDeviation() const;
};

GroupLawReport validateGroupLaws(const CarnotGroup& g, std::size_t samples, std::uint64_t seed);
// Sets flags (triangle -> empirically_validated) when the sampled deviation
// stays within tol.
GaugeAxiomReport validateGaugeAxioms(HomogeneousGauge& ng, std::size_t samples,
                                     std::uint64_t seed, double tol = 1e-12);

}  // namespace subfrac
