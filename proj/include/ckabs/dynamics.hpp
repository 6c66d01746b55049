#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "ckabs/errors.hpp"

namespace ckabs {

using State = std::vector<double>;

// Finite window of output labels around a reference time.  labels[i] is the
// output at time start_offset + i; start_offset <= 0, so index -start_offset
// is the label at time 0.
struct Trace {
    std::vector<int> labels;
    int start_offset = 0;

    int first_time() const { return start_offset; }
    int last_time() const { return start_offset + static_cast<int>(labels.size()) - 1; }
    bool spans(int from, int to) const { return first_time() <= from && to <= last_time(); }

    int label_at(int time) const {
        if (!spans(time, time)) throw Error("trace does not cover the requested time");
        return labels[static_cast<std::size_t>(time - start_offset)];
    }
};

// Deterministic discrete-time system with labeled outputs and a random
// initial state.  step advances one time unit; inverse_step, when present,
// undoes it.  initial_sampler must be a pure function of the seed.
struct DynamicalSystem {
    int dimension = 0;
    int alphabet_size = 0;
    std::function<State(const State&)> step;
    std::function<State(const State&)> inverse_step;
    std::function<int(const State&)> output;
    std::function<State(std::uint64_t)> initial_sampler;

    bool has_inverse() const { return static_cast<bool>(inverse_step); }
};

// Samples an initial state from the given seed and records outputs for
// times -past .. future.  Throws PastUnavailable when past > 0 and the
// system has no inverse.
Trace simulate_trace(const DynamicalSystem& system, std::uint64_t seed, int past, int future);

// Axis-aligned box with optional bounds per dimension; bounded sides are
// closed.  An empty box matches every state (catch-all).
struct LabelRegion {
    struct Interval {
        std::optional<double> lo, hi;

        bool contains(double x) const {
            return (!lo || *lo <= x) && (!hi || x <= *hi);
        }
        bool overlaps(double other_lo, double other_hi) const {
            return (!lo || *lo <= other_hi) && (!hi || other_lo <= *hi);
        }
    };

    std::vector<Interval> box;
    int label = 0;

    bool contains(const State& x) const;
    bool overlaps_box(const std::vector<std::pair<double, double>>& other) const;
};

// Affine map x' = a x + b with labels assigned by the first matching region
// and initial states uniform over init_box.  The inverse map is factorized
// once at construction, never per step.
struct AffineSystem {
    int dimension = 0;
    int alphabet_size = 0;
    std::vector<double> a;          // row-major dimension x dimension
    std::vector<double> b;
    std::vector<double> a_inverse;  // row-major inverse of a
    std::vector<LabelRegion> regions;  // evaluated in order; last one is the catch-all
    std::vector<std::pair<double, double>> init_box;

    // Euler discretization x' = (I + h A) x + h b of the continuous-time
    // field dx/dt = A x + b.
    static AffineSystem from_continuous(int dimension,
                                        const std::vector<double>& a_continuous,
                                        const std::vector<double>& b_continuous,
                                        double h_step,
                                        std::vector<LabelRegion> regions,
                                        std::vector<std::pair<double, double>> init_box,
                                        int alphabet_size);

    State step(const State& x) const;
    State inverse_step(const State& x) const;
    int output(const State& x) const;
    State sample_initial(std::uint64_t seed) const;

    // Closure bundle over an immutable copy of this system.
    DynamicalSystem system() const;
};

// Charged particle in constant electric and magnetic fields, Euler
// discretized with step 0.1.  State (p1, p2, v1, v2); outputs: 0 inside the
// obstacle [0.5,1.5]x[-0.5,0.5], 1 when p1 >= 1.5 outside it, 2 elsewhere.
// Initial states uniform over [-1,4]x[-1,1]x[-1,1]x[-1,1].
AffineSystem make_lorentz_system();

// Rotation by theta on the circle [0,1) with output 0 on [0,0.5) and 1 on
// [0.5,1); initial states uniform, inverse available.
DynamicalSystem make_rotation_system(double theta);

}  // namespace ckabs
