#include "vcma/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "vcma/constants.hpp"
#include "vcma/errors.hpp"

namespace vcma {

std::string format_double(double value)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

namespace {

std::string row(std::initializer_list<double> values)
{
    std::string out;
    bool first = true;
    for (double v : values) {
        if (!first) out += ',';
        out += format_double(v);
        first = false;
    }
    out += '\n';
    return out;
}

std::string u64(std::uint64_t v) { return std::to_string(v); }

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string tok;
    std::istringstream in(line);
    while (std::getline(in, tok, sep)) {
        out.push_back(tok);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

double parse_number(const std::string& tok, std::size_t line)
{
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw InvalidParameter("csv line " + std::to_string(line) + ": '" + tok + "' is not a number");
    }
    return v;
}

} // namespace

std::string curve_csv(const Curve& curve, const std::string& header)
{
    std::string out = header + "x,p,ci_low,ci_high,n,seed\n";
    for (const auto& pt : curve) {
        const auto& e = pt.estimate;
        out += format_double(pt.x) + ',' + format_double(e.p) + ',' + format_double(e.ci_low) + ',' +
               format_double(e.ci_high) + ',' + u64(e.n_trials) + ',' + u64(e.seed) + '\n';
    }
    return out;
}

std::string trajectory_csv(const Trajectory& trajectory, const std::string& header)
{
    std::string out = header + "# switched: " + (trajectory.switched ? "1" : "0") + "\nt_s,mx,my,mz,U_V\n";
    for (const auto& s : trajectory.samples) {
        out += row({s.t, s.m.x, s.m.y, s.m.z, s.voltage});
    }
    return out;
}

std::string field_map_csv(const std::vector<FieldSample>& samples, const std::string& header)
{
    std::string out = header + "theta,phi,mx,my,mz,vx,vy,vz,Hx,Hy,Hz\n";
    for (const auto& s : samples) {
        out += row({s.theta, s.phi, s.m.x, s.m.y, s.m.z, s.velocity.x, s.velocity.y, s.velocity.z, s.h.hx, s.h.hy,
                    s.h.hz});
    }
    return out;
}

std::string histogram_csv(const ExitHistogram& histogram, const std::string& header)
{
    std::string out = header;
    out += "# robustness metric C2 = |<exp(2 i phi)>| over exit azimuths: " + format_double(histogram.concentration) +
           "\n# exited: " + u64(histogram.exited) + "\n# never_exited: " + u64(histogram.never_exited) + "\n";
    out += "phi_bin,count\n";
    const double n = static_cast<double>(histogram.counts.size());
    for (std::size_t b = 0; b < histogram.counts.size(); ++b) {
        const double center = -constants::pi + (static_cast<double>(b) + 0.5) * 2.0 * constants::pi / n;
        out += format_double(center) + ',' + u64(histogram.counts[b]) + '\n';
    }
    return out;
}

CsvTable parse_csv(const std::string& text, const std::vector<std::string>& expected_columns)
{
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            table.comments.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
            continue;
        }
        const auto cells = split(line, ',');
        if (!have_header) {
            table.columns = cells;
            have_header = true;
            if (!expected_columns.empty() && table.columns != expected_columns) {
                throw InvalidParameter("csv line " + std::to_string(line_no) + ": unexpected header '" + line + "'");
            }
            continue;
        }
        if (cells.size() != table.columns.size()) {
            throw InvalidParameter("csv line " + std::to_string(line_no) + ": " + std::to_string(cells.size()) +
                                   " fields, expected " + std::to_string(table.columns.size()));
        }
        std::vector<double> values;
        values.reserve(cells.size());
        for (const auto& c : cells) {
            values.push_back(parse_number(c, line_no));
        }
        table.rows.push_back(std::move(values));
    }
    if (!have_header) {
        throw InvalidParameter("csv: missing header row");
    }
    return table;
}

Curve read_curve_csv(const std::string& text)
{
    const CsvTable t = parse_csv(text, {"x", "p", "ci_low", "ci_high", "n", "seed"});
    Curve curve;
    for (const auto& r : t.rows) {
        CurvePoint pt;
        pt.x = r[0];
        pt.estimate.p = r[1];
        pt.estimate.ci_low = r[2];
        pt.estimate.ci_high = r[3];
        pt.estimate.n_trials = static_cast<std::uint64_t>(r[4]);
        pt.estimate.n_switched = static_cast<std::uint64_t>(std::llround(r[1] * r[4]));
        curve.push_back(pt);
    }
    // Seeds exceed double precision; reread them as integers.
    std::istringstream in(text);
    std::string line;
    std::size_t k = 0;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        const auto cells = split(line, ',');
        if (k < curve.size()) {
            curve[k++].estimate.seed = std::stoull(cells.back());
        }
    }
    return curve;
}

Trajectory read_trajectory_csv(const std::string& text)
{
    const CsvTable t = parse_csv(text, {"t_s", "mx", "my", "mz", "U_V"});
    Trajectory traj;
    for (const auto& r : t.rows) {
        traj.samples.push_back({r[0], {r[1], r[2], r[3]}, r[4]});
    }
    if (!traj.samples.empty()) {
        traj.final_state = traj.samples.back().m;
    }
    traj.switched = traj.final_state.z > 0.0;
    return traj;
}

std::vector<FieldSample> read_field_map_csv(const std::string& text)
{
    const CsvTable t =
        parse_csv(text, {"theta", "phi", "mx", "my", "mz", "vx", "vy", "vz", "Hx", "Hy", "Hz"});
    std::vector<FieldSample> out;
    for (const auto& r : t.rows) {
        FieldSample s;
        s.theta = r[0];
        s.phi = r[1];
        s.m = {r[2], r[3], r[4]};
        s.velocity = {r[5], r[6], r[7]};
        s.h = {r[8], r[9], r[10]};
        out.push_back(s);
    }
    return out;
}

std::vector<std::uint64_t> read_histogram_csv(const std::string& text)
{
    const CsvTable t = parse_csv(text, {"phi_bin", "count"});
    std::vector<std::uint64_t> counts;
    for (const auto& r : t.rows) {
        counts.push_back(static_cast<std::uint64_t>(r[1]));
    }
    return counts;
}

} // namespace vcma
