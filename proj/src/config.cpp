#include "vcma/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace vcma {

namespace {

// Decimal nanoseconds to seconds without accumulating grid error.
double ns(double value) { return value / 1e9; }

Json range_ns(int first_tenths, int last_tenths, int step_tenths)
{
    Json out = Json::array();
    for (int k = first_tenths; k <= last_tenths; k += step_tenths) {
        out.push_back(ns(k / 10.0));
    }
    return out;
}

Json default_widths()
{
    Json w = range_ns(2, 30, 2);
    for (int k : {4, 5, 6, 7, 8, 9, 10, 12, 15, 18, 21, 24, 27, 30}) {
        w.push_back(ns(k));
    }
    return w;
}

Json default_amplitudes()
{
    Json a = Json::array();
    for (int k = 30; k <= 100; k += 5) {
        a.push_back(k / 100.0);
    }
    return a;
}

// Keys whose value may be null; the prototype gives the non-null type.
const std::map<std::string, Json>& nullable_keys()
{
    static const std::map<std::string, Json> keys{
        {"device.demag", Json{{"nx", 0.0}, {"ny", 0.0}, {"nz", 0.0}}},
        {"experiment.xbar_write.p_sel", 0.0},
        {"experiment.xbar_write.p_half", 0.0},
        {"experiment.xbar_write.state_file", ""},
        {"experiment.sneak.state_file", ""},
    };
    return keys;
}

std::string join(const std::vector<std::string>& path)
{
    std::string out;
    for (const auto& p : path) {
        out += (out.empty() ? "" : ".") + p;
    }
    return out;
}

const char* kind_name(const Json& j)
{
    if (j.is_null()) return "null";
    if (j.is_boolean()) return "boolean";
    if (j.is_number_unsigned()) return "non-negative integer";
    if (j.is_number_integer()) return "integer";
    if (j.is_number()) return "number";
    if (j.is_string()) return "string";
    if (j.is_array()) return "array";
    return "object";
}

struct Merger {
    const std::string& text;
    const std::string& origin;

    [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& what) const
    {
        const std::size_t line = text.empty() ? 0 : locate_key(text, path);
        std::string where = origin;
        if (line > 0) {
            where += ":" + std::to_string(line);
        }
        throw ConfigError(where + ": " + what);
    }

    bool type_matches(const Json& proto, const Json& value) const
    {
        if (proto.is_number_unsigned()) {
            return value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0);
        }
        if (proto.is_number_integer()) {
            return value.is_number_integer();
        }
        if (proto.is_number()) {
            return value.is_number();
        }
        return proto.type() == value.type();
    }

    void merge(Json& target, const Json& value, std::vector<std::string>& path) const
    {
        const std::string key = join(path);
        const auto nullable = nullable_keys().find(key);
        if (value.is_null()) {
            if (nullable == nullable_keys().end()) {
                fail(path, "'" + key + "' may not be null");
            }
            target = nullptr;
            return;
        }
        const Json& proto = (target.is_null() && nullable != nullable_keys().end()) ? nullable->second : target;
        if (!type_matches(proto, value)) {
            fail(path, "'" + key + "' expects " + kind_name(proto) + ", got " + kind_name(value));
        }
        if (proto.is_object()) {
            Json merged = proto;
            for (auto it = value.begin(); it != value.end(); ++it) {
                path.push_back(it.key());
                if (!merged.contains(it.key())) {
                    fail(path, "unknown key '" + join(path) + "'");
                }
                merge(merged[it.key()], it.value(), path);
                path.pop_back();
            }
            target = std::move(merged);
        } else if (proto.is_array()) {
            if (!proto.empty()) {
                for (std::size_t i = 0; i < value.size(); ++i) {
                    path.push_back(std::to_string(i));
                    check_element(proto.front(), value[i], path);
                    path.pop_back();
                }
            }
            target = value;
        } else {
            target = value;
        }
    }

    void check_element(const Json& proto, const Json& value, std::vector<std::string>& path) const
    {
        if (!type_matches(proto, value)) {
            fail(path, "element " + join(path) + " expects " + kind_name(proto) + ", got " + kind_name(value));
        }
        if (proto.is_array() && !proto.empty()) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                path.push_back(std::to_string(i));
                check_element(proto.front(), value[i], path);
                path.pop_back();
            }
        }
    }
};

std::size_t line_of_offset(const std::string& text, std::size_t offset)
{
    std::size_t line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        line += text[i] == '\n';
    }
    return line;
}

// Embedded config from an emitted file, or the text itself.
std::string extract_config_text(const std::string& text, const std::string& origin, bool& embedded)
{
    embedded = false;
    std::istringstream in(text);
    std::string line;
    static const std::string tag = "# config: ";
    while (std::getline(in, line)) {
        if (line.rfind(tag, 0) == 0) {
            embedded = true;
            return line.substr(tag.size());
        }
        if (!line.empty() && line[0] != '#') {
            break;
        }
    }
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '#') {
        throw ConfigError(origin + ": comment header without an embedded '# config:' line");
    }
    return text;
}

double number_at(const Json& j, const char* key) { return j.at(key).get<double>(); }

} // namespace

Json default_config()
{
    const DeviceParams d;
    const SolverConfig s;
    Json follow = Json::array();
    for (int k = 1; k <= 10; ++k) {
        follow.push_back(ns(k));
    }
    Json cfg;
    cfg["seed"] = std::uint64_t{20240501};
    cfg["n_trials"] = std::uint64_t{4000};
    cfg["device"] = Json{
        {"width", d.width},
        {"length", d.length},
        {"free_thickness", d.free_thickness},
        {"oxide_thickness", d.oxide_thickness},
        {"saturation_magnetization", d.saturation_magnetization},
        {"damping", d.damping},
        {"temperature", d.temperature},
        {"vcma_coefficient", d.vcma_coefficient},
        {"interface_anisotropy", d.interface_anisotropy},
        {"polarization", d.polarization},
        {"r_parallel", d.r_parallel},
        {"r_antiparallel", d.r_antiparallel},
        {"pinned", Json::array({d.pinned.x, d.pinned.y, d.pinned.z})},
        {"demag", nullptr},
    };
    cfg["solver"] = Json{
        {"dt", s.dt},
        {"t_init", s.t_init},
        {"t_relax", s.t_relax},
        {"record_stride", static_cast<std::uint64_t>(s.record_stride)},
        {"scheme", "heun"},
    };
    Json combined{{"vcma_voltage", 0.7}, {"vcma_width", ns(1.8)}, {"stt_voltage", 0.6}, {"follow_widths", follow}};
    cfg["experiment"] = Json{
        {"sweep_width", Json{{"voltage", 0.7}, {"widths", default_widths()}}},
        {"sweep_amplitude", Json{{"width", ns(1.8)}, {"amplitudes", default_amplitudes()}}},
        {"combined", combined},
        {"half_select", combined},
        {"field_map",
         Json{{"voltage", 0.7},
              {"grid_n", std::uint64_t{24}},
              {"cap_angle", 0.0},
              {"include_stt", false},
              {"separate_precession", false},
              {"ordering_cap_angle", 0.5},
              {"ordering_grid_n", std::uint64_t{72}},
              {"ordering_tilt", 0.0}}},
        {"exit_hist",
         Json{{"voltage", 0.7},
              {"exit_angle", 30.0 * 3.14159265358979323846 / 180.0},
              {"window", ns(5)},
              {"bins", std::uint64_t{36}},
              {"trajectories", std::uint64_t{10}}}},
        {"xbar_write",
         Json{{"rows", std::uint64_t{128}},
              {"cols", std::uint64_t{128}},
              {"target", Json::array({std::uint64_t{0}, std::uint64_t{0}})},
              {"scheme", "half_voltage"},
              {"initial_state", "P"},
              {"state_file", nullptr},
              {"waveform", Json::array({Json::array({0.7, ns(1.8)}), Json::array({0.6, ns(9)})})},
              {"p_sel", nullptr},
              {"p_half", nullptr}}},
        {"sneak",
         Json{{"rows", std::uint64_t{4}},
              {"cols", std::uint64_t{4}},
              {"driven_row", std::uint64_t{0}},
              {"driven_col", std::uint64_t{0}},
              {"voltage", 0.7},
              {"initial_state", "P"},
              {"state_file", nullptr}}},
        {"validate", Json::object()},
    };
    return cfg;
}

std::size_t locate_key(const std::string& text, const std::vector<std::string>& path)
{
    struct Frame {
        bool object;
        std::string key;
        std::size_t index;
    };
    std::vector<Frame> stack;
    std::size_t line = 1;
    std::size_t i = 0;
    auto current = [&](const std::string& last) {
        std::vector<std::string> p;
        for (const auto& f : stack) {
            if (&f == &stack.back()) break;
            p.push_back(f.object ? f.key : std::to_string(f.index));
        }
        p.push_back(last);
        return p;
    };
    auto element_path = [&]() {
        std::vector<std::string> p;
        for (const auto& f : stack) {
            p.push_back(f.object ? f.key : std::to_string(f.index));
        }
        return p;
    };
    bool value_pending = false; // inside an array, the next value starts an element
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (!stack.empty() && !stack.back().object && value_pending && c != ' ' && c != '\t' && c != '\r' &&
            c != ']') {
            value_pending = false;
            if (element_path() == path) {
                return line;
            }
        }
        if (c == '"') {
            std::string s;
            ++i;
            while (i < text.size() && text[i] != '"') {
                if (text[i] == '\\' && i + 1 < text.size()) {
                    s += text[i + 1];
                    i += 2;
                    continue;
                }
                if (text[i] == '\n') ++line;
                s += text[i++];
            }
            ++i;
            std::size_t j = i;
            while (j < text.size() && (text[j] == ' ' || text[j] == '\t' || text[j] == '\r' || text[j] == '\n')) {
                ++j;
            }
            if (j < text.size() && text[j] == ':' && !stack.empty() && stack.back().object) {
                stack.back().key = s;
                if (current(s) == path) {
                    return line;
                }
            }
            continue;
        }
        if (c == '{' || c == '[') {
            stack.push_back({c == '{', "", 0});
            value_pending = c == '[';
        } else if (c == '}' || c == ']') {
            if (!stack.empty()) stack.pop_back();
            value_pending = false;
        } else if (c == ',' && !stack.empty() && !stack.back().object) {
            ++stack.back().index;
            value_pending = true;
        }
        ++i;
    }
    return 0;
}

namespace {

// Config path named at the start of a range-check message, for line anchoring.
std::vector<std::string> range_error_path(const std::string& msg)
{
    static const std::vector<std::pair<std::string, std::string>> prefixes{
        {"device parameter out of range: ", "device"}, {"solver: ", "solver"}};
    std::string head = msg;
    std::vector<std::string> path;
    for (const auto& [prefix, block] : prefixes) {
        if (msg.rfind(prefix, 0) == 0) {
            head = msg.substr(prefix.size());
            path.push_back(block);
            break;
        }
    }
    head = head.substr(0, head.find_first_of(" :"));
    std::stringstream ss(head);
    std::string part;
    while (std::getline(ss, part, '.')) {
        path.push_back(part);
    }
    return path;
}

} // namespace

Json parse_config(const std::string& text, const std::string& origin)
{
    bool embedded = false;
    const std::string body = extract_config_text(text, origin, embedded);
    Json user;
    try {
        user = Json::parse(body);
    } catch (const Json::parse_error& e) {
        const std::size_t line = embedded ? 0 : line_of_offset(body, e.byte > 0 ? e.byte - 1 : 0);
        std::string msg = e.what();
        throw ConfigError(origin + (line ? ":" + std::to_string(line) : std::string()) + ": malformed JSON: " + msg);
    }
    if (!user.is_object()) {
        throw ConfigError(origin + ":1: config must be a JSON object");
    }
    // Emitted JSON reports carry the resolved config under "config".
    if (!embedded && user.contains("config") && user["config"].is_object()) {
        user = user["config"];
        embedded = true;
    }
    Json cfg = default_config();
    std::vector<std::string> path;
    const std::string empty;
    Merger{embedded ? empty : body, origin}.merge(cfg, user, path);
    try {
        validate_config(cfg);
    } catch (const InvalidParameter& e) {
        const std::string msg = e.what();
        const std::size_t line = embedded ? 0 : locate_key(body, range_error_path(msg));
        throw ConfigError(origin + (line ? ":" + std::to_string(line) : std::string()) + ": " + msg);
    }
    return cfg;
}

Json load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path + ": cannot open config file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

void apply_override(Json& config, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--set " + assignment + ": expected key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(raw);
    } catch (const Json::parse_error&) {
        value = raw;
    }
    std::vector<std::string> parts;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, '.')) {
        parts.push_back(part);
    }
    // Wrap the value in its path and merge it like a config file.
    Json patch = value;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        Json outer = Json::object();
        outer[*it] = std::move(patch);
        patch = std::move(outer);
    }
    std::vector<std::string> path;
    const std::string empty;
    const std::string origin = "--set " + key;
    Merger{empty, origin}.merge(config, patch, path);
}

DeviceParams device_params(const Json& config)
{
    const Json& d = config.at("device");
    DeviceParams p;
    p.width = number_at(d, "width");
    p.length = number_at(d, "length");
    p.free_thickness = number_at(d, "free_thickness");
    p.oxide_thickness = number_at(d, "oxide_thickness");
    p.saturation_magnetization = number_at(d, "saturation_magnetization");
    p.damping = number_at(d, "damping");
    p.temperature = number_at(d, "temperature");
    p.vcma_coefficient = number_at(d, "vcma_coefficient");
    p.interface_anisotropy = number_at(d, "interface_anisotropy");
    p.polarization = number_at(d, "polarization");
    p.r_parallel = number_at(d, "r_parallel");
    p.r_antiparallel = number_at(d, "r_antiparallel");
    const Json& pin = d.at("pinned");
    if (pin.size() != 3) {
        throw ConfigError("device.pinned must have 3 components");
    }
    p.pinned = {pin[0].get<double>(), pin[1].get<double>(), pin[2].get<double>()};
    if (d.at("demag").is_null()) {
        p.demag.reset();
    } else {
        const Json& n = d.at("demag");
        p.demag = DemagFactors{number_at(n, "nx"), number_at(n, "ny"), number_at(n, "nz")};
    }
    return p;
}

SolverConfig solver_config(const Json& config)
{
    const Json& s = config.at("solver");
    SolverConfig c;
    c.dt = number_at(s, "dt");
    c.t_init = number_at(s, "t_init");
    c.t_relax = number_at(s, "t_relax");
    c.record_stride = static_cast<int>(s.at("record_stride").get<std::uint64_t>());
    if (s.at("scheme").get<std::string>() != "heun") {
        throw ConfigError("solver.scheme: only 'heun' is supported");
    }
    return c;
}

std::uint64_t config_seed(const Json& config) { return config.at("seed").get<std::uint64_t>(); }

std::uint64_t config_trials(const Json& config) { return config.at("n_trials").get<std::uint64_t>(); }

void validate_config(const Json& config)
{
    device_params(config).validate();
    solver_config(config).validate();
    if (config_trials(config) < 1) {
        throw ConfigError("n_trials must be >= 1");
    }
    const Json& e = config.at("experiment");
    auto positive_list = [](const Json& list, const std::string& name, bool allow_zero) {
        if (list.empty()) {
            throw ConfigError(name + " must not be empty");
        }
        for (const auto& v : list) {
            const double x = v.get<double>();
            if (!std::isfinite(x) || x < 0.0 || (!allow_zero && x == 0.0)) {
                throw ConfigError(name + " entries must be " + (allow_zero ? "non-negative" : "positive"));
            }
        }
    };
    positive_list(e.at("sweep_width").at("widths"), "experiment.sweep_width.widths", false);
    if (e.at("sweep_amplitude").at("amplitudes").empty()) {
        throw ConfigError("experiment.sweep_amplitude.amplitudes must not be empty");
    }
    if (!(number_at(e.at("sweep_amplitude"), "width") > 0.0)) {
        throw ConfigError("experiment.sweep_amplitude.width must be positive");
    }
    for (const char* block : {"combined", "half_select"}) {
        positive_list(e.at(block).at("follow_widths"), std::string("experiment.") + block + ".follow_widths", true);
        if (!(number_at(e.at(block), "vcma_width") > 0.0)) {
            throw ConfigError(std::string("experiment.") + block + ".vcma_width must be positive");
        }
    }
    const Json& fm = e.at("field_map");
    if (fm.at("grid_n").get<std::uint64_t>() < 8) {
        throw ConfigError("experiment.field_map.grid_n must be >= 8");
    }
    const double cap = number_at(fm, "cap_angle");
    if (cap < 0.0 || cap >= 3.14159265358979323846 / 2.0) {
        throw ConfigError("experiment.field_map.cap_angle must lie in [0, pi/2)");
    }
    const double ocap = number_at(fm, "ordering_cap_angle");
    if (!(ocap > 0.0 && ocap < 3.14159265358979323846 / 2.0)) {
        throw ConfigError("experiment.field_map.ordering_cap_angle must lie in (0, pi/2)");
    }
    if (fm.at("ordering_grid_n").get<std::uint64_t>() < 4) {
        throw ConfigError("experiment.field_map.ordering_grid_n must be >= 4");
    }
    const Json& eh = e.at("exit_hist");
    const double ea = number_at(eh, "exit_angle");
    if (!(ea > 0.0 && ea < 3.14159265358979323846 / 2.0)) {
        throw ConfigError("experiment.exit_hist.exit_angle must lie in (0, pi/2)");
    }
    if (!(number_at(eh, "window") > 0.0)) {
        throw ConfigError("experiment.exit_hist.window must be positive");
    }
    if (eh.at("bins").get<std::uint64_t>() < 1) {
        throw ConfigError("experiment.exit_hist.bins must be >= 1");
    }
    const Json& xw = e.at("xbar_write");
    if (xw.at("rows").get<std::uint64_t>() < 1 || xw.at("cols").get<std::uint64_t>() < 1) {
        throw ConfigError("experiment.xbar_write: rows and cols must be >= 1");
    }
    if (xw.at("target").size() != 2) {
        throw ConfigError("experiment.xbar_write.target must be [row, col]");
    }
    if (xw.at("waveform").empty()) {
        throw ConfigError("experiment.xbar_write.waveform must not be empty");
    }
    for (const auto& seg : xw.at("waveform")) {
        if (seg.size() != 2) {
            throw ConfigError("experiment.xbar_write.waveform segments must be [voltage, duration]");
        }
    }
    for (const char* key : {"p_sel", "p_half"}) {
        if (!xw.at(key).is_null()) {
            const double p = xw.at(key).get<double>();
            if (!(p >= 0.0 && p <= 1.0)) {
                throw ConfigError(std::string("experiment.xbar_write.") + key + " must lie in [0, 1]");
            }
        }
    }
    const std::string scheme = xw.at("scheme").get<std::string>();
    if (scheme != "half_voltage" && scheme != "floating") {
        throw ConfigError("experiment.xbar_write.scheme must be half_voltage or floating");
    }
    for (const char* block : {"xbar_write", "sneak"}) {
        const std::string st = e.at(block).at("initial_state").get<std::string>();
        if (st != "P" && st != "AP") {
            throw ConfigError(std::string("experiment.") + block + ".initial_state must be P or AP");
        }
    }
    const Json& sn = e.at("sneak");
    if (sn.at("rows").get<std::uint64_t>() < 1 || sn.at("cols").get<std::uint64_t>() < 1) {
        throw ConfigError("experiment.sneak: rows and cols must be >= 1");
    }
    if (!std::isfinite(number_at(sn, "voltage"))) {
        throw ConfigError("experiment.sneak.voltage must be finite");
    }
}

std::string config_header(const Json& config)
{
    return "# config: " + config.dump() + "\n# seed: " + std::to_string(config_seed(config)) + "\n";
}

} // namespace vcma
