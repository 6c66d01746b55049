#include "ckabs/dynamics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <memory>

#include "ckabs/random.hpp"

namespace ckabs {

Trace simulate_trace(const DynamicalSystem& system, std::uint64_t seed, int past, int future) {
    if (past < 0 || future < 0) throw Error("trace window must be nonnegative");
    if (past > 0 && !system.has_inverse())
        throw PastUnavailable("system has no inverse map, cannot simulate past labels");

    Trace trace;
    trace.start_offset = -past;
    trace.labels.resize(static_cast<std::size_t>(past + future + 1));

    State x0 = system.initial_sampler(seed);
    trace.labels[static_cast<std::size_t>(past)] = system.output(x0);

    State x = x0;
    for (int i = 1; i <= future; ++i) {
        x = system.step(x);
        trace.labels[static_cast<std::size_t>(past + i)] = system.output(x);
    }
    x = x0;
    for (int i = 1; i <= past; ++i) {
        x = system.inverse_step(x);
        trace.labels[static_cast<std::size_t>(past - i)] = system.output(x);
    }
    return trace;
}

bool LabelRegion::contains(const State& x) const {
    for (std::size_t i = 0; i < box.size(); ++i) {
        if (i >= x.size()) throw Error("label region has more dimensions than the state");
        if (!box[i].contains(x[i])) return false;
    }
    return true;
}

bool LabelRegion::overlaps_box(const std::vector<std::pair<double, double>>& other) const {
    for (std::size_t i = 0; i < box.size() && i < other.size(); ++i) {
        if (!box[i].overlaps(other[i].first, other[i].second)) return false;
    }
    return true;
}

namespace {

std::vector<double> invert_matrix(const std::vector<double>& a, int d) {
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = a[static_cast<std::size_t>(i * d + j)];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (std::abs(lu.determinant()) <= 1e-12)
        throw Error("affine map is singular, no inverse dynamics");
    Eigen::MatrixXd inv = lu.inverse();
    std::vector<double> out(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(i * d + j)] = inv(i, j);
    return out;
}

void matvec(const std::vector<double>& m, const State& x, State& out, int d) {
    for (int i = 0; i < d; ++i) {
        double acc = 0.0;
        const double* row = m.data() + static_cast<std::size_t>(i * d);
        for (int j = 0; j < d; ++j) acc += row[j] * x[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc;
    }
}

}  // namespace

AffineSystem AffineSystem::from_continuous(int dimension,
                                           const std::vector<double>& a_continuous,
                                           const std::vector<double>& b_continuous,
                                           double h_step,
                                           std::vector<LabelRegion> regions,
                                           std::vector<std::pair<double, double>> init_box,
                                           int alphabet_size) {
    const auto d = static_cast<std::size_t>(dimension);
    if (a_continuous.size() != d * d || b_continuous.size() != d)
        throw Error("affine system dimensions do not match the matrix sizes");
    if (init_box.size() != d) throw Error("initial box dimension mismatch");
    if (regions.empty() || !regions.back().box.empty())
        throw Error("label regions must end with a catch-all (empty box)");
    for (const auto& region : regions) {
        if (region.label < 0 || region.label >= alphabet_size)
            throw Error("region label outside the alphabet");
        if (region.box.size() > d) throw Error("region box dimension mismatch");
    }
    for (const auto& [lo, hi] : init_box)
        if (!(lo < hi)) throw Error("initial box sides must have positive width");

    AffineSystem sys;
    sys.dimension = dimension;
    sys.alphabet_size = alphabet_size;
    sys.regions = std::move(regions);
    sys.init_box = std::move(init_box);
    sys.a.assign(d * d, 0.0);
    sys.b.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j)
            sys.a[i * d + j] = (i == j ? 1.0 : 0.0) + h_step * a_continuous[i * d + j];
        sys.b[i] = h_step * b_continuous[i];
    }
    sys.a_inverse = invert_matrix(sys.a, dimension);
    return sys;
}

State AffineSystem::step(const State& x) const {
    State out(static_cast<std::size_t>(dimension));
    matvec(a, x, out, dimension);
    for (int i = 0; i < dimension; ++i) out[static_cast<std::size_t>(i)] += b[static_cast<std::size_t>(i)];
    return out;
}

State AffineSystem::inverse_step(const State& x) const {
    State shifted(static_cast<std::size_t>(dimension));
    for (int i = 0; i < dimension; ++i)
        shifted[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
    State out(static_cast<std::size_t>(dimension));
    matvec(a_inverse, shifted, out, dimension);
    return out;
}

int AffineSystem::output(const State& x) const {
    for (const auto& region : regions)
        if (region.contains(x)) return region.label;
    throw Error("label regions are not exhaustive");  // unreachable with a catch-all
}

State AffineSystem::sample_initial(std::uint64_t seed) const {
    Rng rng(seed);
    State x(static_cast<std::size_t>(dimension));
    for (int i = 0; i < dimension; ++i) {
        const auto& [lo, hi] = init_box[static_cast<std::size_t>(i)];
        x[static_cast<std::size_t>(i)] = rng.uniform(lo, hi);
    }
    return x;
}

DynamicalSystem AffineSystem::system() const {
    auto self = std::make_shared<AffineSystem>(*this);
    DynamicalSystem sys;
    sys.dimension = dimension;
    sys.alphabet_size = alphabet_size;
    sys.step = [self](const State& x) { return self->step(x); };
    sys.inverse_step = [self](const State& x) { return self->inverse_step(x); };
    sys.output = [self](const State& x) { return self->output(x); };
    sys.initial_sampler = [self](std::uint64_t seed) { return self->sample_initial(seed); };
    return sys;
}

AffineSystem make_lorentz_system() {
    const double mass = 9.1e-31;
    const double charge = 1.6e-19;
    const double e1 = -1.0e-10;
    const double e2 = 5.0e-11;
    const double b3 = 1.0e-11;
    const double w = charge * b3 / mass;

    // State (p1, p2, v1, v2): positions integrate velocities, velocities
    // feel the electric field and rotate in the magnetic field.
    std::vector<double> a_cont = {
        0, 0, 1, 0,
        0, 0, 0, 1,
        0, 0, 0, w,
        0, 0, -w, 0,
    };
    std::vector<double> b_cont = {0, 0, charge * e1 / mass, charge * e2 / mass};

    std::vector<LabelRegion> regions(3);
    regions[0].box = {{0.5, 1.5}, {-0.5, 0.5}, {}, {}};
    regions[0].label = 0;  // obstacle
    regions[1].box = {{1.5, std::nullopt}};
    regions[1].label = 1;  // beyond the obstacle on the p1 axis
    regions[2].label = 2;  // everywhere else

    std::vector<std::pair<double, double>> init_box = {{-1, 4}, {-1, 1}, {-1, 1}, {-1, 1}};
    return AffineSystem::from_continuous(4, a_cont, b_cont, 0.1, std::move(regions),
                                         std::move(init_box), 3);
}

DynamicalSystem make_rotation_system(double theta) {
    if (!(theta >= 0.0 && theta < 1.0)) throw Error("rotation angle must lie in [0,1)");
    auto wrap = [](double x) {
        double y = x - std::floor(x);
        return y < 1.0 ? y : 0.0;  // guard against floor rounding at the seam
    };
    DynamicalSystem sys;
    sys.dimension = 1;
    sys.alphabet_size = 2;
    sys.step = [theta, wrap](const State& x) { return State{wrap(x[0] + theta)}; };
    sys.inverse_step = [theta, wrap](const State& x) { return State{wrap(x[0] - theta)}; };
    sys.output = [](const State& x) { return x[0] < 0.5 ? 0 : 1; };
    sys.initial_sampler = [](std::uint64_t seed) { return State{Rng(seed).uniform01()}; };
    return sys;
}

}  // namespace ckabs
