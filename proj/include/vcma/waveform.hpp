#pragma once

#include <vector>

namespace vcma {

struct Segment {
    double voltage = 0.0;  // V
    double duration = 0.0; // s

    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Piecewise-constant voltage program with ideal rectangular edges.
/// Segment boundaries are left-closed: the voltage at a breakpoint belongs to
/// the segment that starts there. Zero outside [0, duration()).
class Waveform {
public:
    /// Throws InvalidParameter if empty, any duration < 0, or the total is 0.
    explicit Waveform(std::vector<Segment> segments);

    const std::vector<Segment>& segments() const { return segments_; }
    double duration() const { return duration_; }

    /// Throws InvalidParameter for t < 0.
    double voltage_at(double t) const;

    /// Every segment voltage multiplied by `factor` (0.5 for half-selected cells).
    Waveform scaled(double factor) const;

    /// Adjacent equal-voltage segments merged, zero-length segments dropped.
    Waveform merged() const;

    /// Sum over segments of U^2 * duration, V^2 s.
    double squared_voltage_integral() const;

    friend bool operator==(const Waveform&, const Waveform&) = default;

private:
    std::vector<Segment> segments_;
    double duration_ = 0.0;
};

Waveform vcma_pulse(double voltage, double width);

Waveform combined_pulse(double vcma_voltage, double vcma_width, double stt_voltage, double stt_width);

inline double voltage_at(const Waveform& w, double t) { return w.voltage_at(t); }

} // namespace vcma
