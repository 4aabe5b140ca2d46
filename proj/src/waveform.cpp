#include "vcma/waveform.hpp"

#include <cmath>
#include <utility>

#include "vcma/errors.hpp"

namespace vcma {

Waveform::Waveform(std::vector<Segment> segments) : segments_(std::move(segments))
{
    if (segments_.empty()) {
        throw InvalidParameter("waveform: at least one segment required");
    }
    for (const auto& s : segments_) {
        if (!(s.duration >= 0.0) || !std::isfinite(s.duration) || !std::isfinite(s.voltage)) {
            throw InvalidParameter("waveform: segment durations must be finite and >= 0");
        }
        duration_ += s.duration;
    }
    if (!(duration_ > 0.0)) {
        throw InvalidParameter("waveform: total duration must be > 0");
    }
}

double Waveform::voltage_at(double t) const
{
    if (t < 0.0) {
        throw InvalidParameter("waveform: time must be >= 0");
    }
    double start = 0.0;
    for (const auto& s : segments_) {
        const double end = start + s.duration;
        if (t >= start && t < end) {
            return s.voltage;
        }
        start = end;
    }
    return 0.0;
}

Waveform Waveform::scaled(double factor) const
{
    auto out = segments_;
    for (auto& s : out) {
        s.voltage *= factor;
    }
    return Waveform(std::move(out));
}

Waveform Waveform::merged() const
{
    std::vector<Segment> out;
    for (const auto& s : segments_) {
        if (s.duration == 0.0) {
            continue;
        }
        if (!out.empty() && out.back().voltage == s.voltage) {
            out.back().duration += s.duration;
        } else {
            out.push_back(s);
        }
    }
    return Waveform(std::move(out));
}

double Waveform::squared_voltage_integral() const
{
    double sum = 0.0;
    for (const auto& s : segments_) {
        sum += s.voltage * s.voltage * s.duration;
    }
    return sum;
}

Waveform vcma_pulse(double voltage, double width)
{
    if (!(width > 0.0)) {
        throw InvalidParameter("vcma_pulse: width must be > 0");
    }
    return Waveform({{voltage, width}});
}

Waveform combined_pulse(double vcma_voltage, double vcma_width, double stt_voltage, double stt_width)
{
    if (!(vcma_width > 0.0) || !(stt_width > 0.0)) {
        throw InvalidParameter("combined_pulse: widths must be > 0");
    }
    return Waveform({{vcma_voltage, vcma_width}, {stt_voltage, stt_width}});
}

} // namespace vcma
