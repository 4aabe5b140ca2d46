#include "vcma/crossbar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "vcma/errors.hpp"

namespace vcma {

std::string to_string(CellState state)
{
    switch (state) {
    case CellState::P: return "P";
    case CellState::AP: return "AP";
    case CellState::open: return "X";
    }
    return "?";
}

CrossbarSpec CrossbarSpec::uniform(std::size_t rows, std::size_t cols, CellState state, const DeviceParams& params)
{
    CrossbarSpec spec;
    spec.rows = rows;
    spec.cols = cols;
    spec.states.assign(rows * cols, state);
    spec.params = params;
    return spec;
}

void CrossbarSpec::validate() const
{
    if (rows < 1 || cols < 1) {
        throw InvalidParameter("crossbar: rows and cols must be >= 1");
    }
    if (states.size() != rows * cols) {
        throw InvalidParameter("crossbar: state array has " + std::to_string(states.size()) + " cells, expected " +
                               std::to_string(rows * cols));
    }
    params.validate();
}

double CrossbarSpec::resistance(std::size_t row, std::size_t col) const
{
    switch (state(row, col)) {
    case CellState::P: return params.r_parallel;
    case CellState::AP: return params.r_antiparallel;
    case CellState::open: break;
    }
    return std::numeric_limits<double>::infinity();
}

Classification classify(const CrossbarSpec& spec, std::size_t row, std::size_t col)
{
    spec.validate();
    if (row >= spec.rows || col >= spec.cols) {
        throw InvalidParameter("classify: target (" + std::to_string(row) + ", " + std::to_string(col) +
                               ") outside a " + std::to_string(spec.rows) + "x" + std::to_string(spec.cols) +
                               " array");
    }
    Classification c;
    c.membership.resize(spec.rows * spec.cols);
    for (std::size_t i = 0; i < spec.rows; ++i) {
        for (std::size_t j = 0; j < spec.cols; ++j) {
            CellClass k = CellClass::unselected;
            if (i == row && j == col) {
                k = CellClass::selected;
                ++c.counts.selected;
            } else if (i == row || j == col) {
                k = CellClass::half_selected;
                ++c.counts.half_selected;
            } else {
                ++c.counts.unselected;
            }
            c.membership[i * spec.cols + j] = k;
        }
    }
    return c;
}

DisturbStats write_disturb(const CrossbarSpec& spec, double p_sel, double p_half)
{
    spec.validate();
    auto check = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw InvalidParameter(std::string("write_disturb: ") + name + " must lie in [0, 1]");
        }
    };
    check(p_sel, "p_sel");
    check(p_half, "p_half");
    DisturbStats s;
    s.half_select_events = spec.rows + spec.cols - 2;
    const double cells = static_cast<double>(spec.rows * spec.cols);
    // log1p keeps the small-p_half case accurate.
    s.per_cell = p_half >= 1.0 ? (s.half_select_events > 0 ? 1.0 : 0.0)
                               : -std::expm1(static_cast<double>(s.half_select_events) * std::log1p(-p_half));
    s.expected_disturbed = cells * s.per_cell;
    s.expected_failed = cells * (1.0 - p_sel);
    return s;
}

std::string to_string(WriteScheme scheme) { return scheme == WriteScheme::half_voltage ? "half_voltage" : "floating"; }

WriteScheme parse_write_scheme(const std::string& text)
{
    if (text == "half_voltage") {
        return WriteScheme::half_voltage;
    }
    if (text == "floating") {
        return WriteScheme::floating;
    }
    throw InvalidParameter("unknown write scheme '" + text + "' (expected half_voltage or floating)");
}

EnergyBreakdown write_energy(const CrossbarSpec& spec, const WriteRequest& request)
{
    const Classification cls = classify(spec, request.row, request.col);
    const double v2t = request.waveform.squared_voltage_integral();

    // Energy per cell for a 1 V drive, scaled by the integral of U^2 dt.
    std::vector<double> unit_power(spec.rows * spec.cols, 0.0);
    if (request.scheme == WriteScheme::half_voltage) {
        for (std::size_t i = 0; i < spec.rows; ++i) {
            for (std::size_t j = 0; j < spec.cols; ++j) {
                const std::size_t k = i * spec.cols + j;
                const double drop = cls.membership[k] == CellClass::selected        ? 1.0
                                    : cls.membership[k] == CellClass::half_selected ? 0.5
                                                                                    : 0.0;
                unit_power[k] = drop * drop / spec.resistance(i, j);
            }
        }
    } else {
        const ConductanceGrid grid = conductances(spec);
        const SneakSolution sol = sneak_solve(grid, request.row, request.col, 1.0);
        for (std::size_t i = 0; i < spec.rows; ++i) {
            for (std::size_t j = 0; j < spec.cols; ++j) {
                const double drop = sol.row_voltages[i] - sol.col_voltages[j];
                unit_power[i * spec.cols + j] = grid.at(i, j) * drop * drop;
            }
        }
    }

    EnergyBreakdown e;
    for (std::size_t k = 0; k < unit_power.size(); ++k) {
        const double energy = unit_power[k] * v2t;
        switch (cls.membership[k]) {
        case CellClass::selected: e.selected += energy; break;
        case CellClass::half_selected: e.half_selected += energy; break;
        case CellClass::unselected: e.unselected += energy; break;
        }
    }
    e.total = e.selected + e.half_selected + e.unselected;
    return e;
}

ConductanceGrid conductances(const CrossbarSpec& spec)
{
    spec.validate();
    ConductanceGrid grid{spec.rows, spec.cols, std::vector<double>(spec.rows * spec.cols)};
    for (std::size_t i = 0; i < spec.rows; ++i) {
        for (std::size_t j = 0; j < spec.cols; ++j) {
            grid.g[i * spec.cols + j] = 1.0 / spec.resistance(i, j);
        }
    }
    return grid;
}

namespace {

std::string line_name(std::size_t node, std::size_t rows)
{
    return node < rows ? "row " + std::to_string(node) : "col " + std::to_string(node - rows);
}

} // namespace

SneakSolution sneak_solve(const ConductanceGrid& grid, std::size_t driven_row, std::size_t driven_col, double voltage)
{
    const std::size_t R = grid.rows;
    const std::size_t C = grid.cols;
    if (R < 1 || C < 1 || grid.g.size() != R * C) {
        throw InvalidParameter("sneak_solve: conductance grid does not match its dimensions");
    }
    if (driven_row >= R || driven_col >= C) {
        throw InvalidParameter("sneak_solve: driven line out of range");
    }
    if (!std::isfinite(voltage)) {
        throw InvalidParameter("sneak_solve: voltage must be finite");
    }
    for (double g : grid.g) {
        if (!(g >= 0.0) || !std::isfinite(g)) {
            throw InvalidParameter("sneak_solve: conductances must be finite and >= 0");
        }
    }

    // Nodes 0..R-1 are row lines, R..R+C-1 column lines.
    const std::size_t n = R + C;
    const std::size_t src = driven_row;
    const std::size_t sink = R + driven_col;

    // Every floating line needs a conductive path to a driven line.
    std::vector<int> seen(n, 0);
    std::vector<std::size_t> stack{src, sink};
    seen[src] = seen[sink] = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        if (u < R) {
            for (std::size_t j = 0; j < C; ++j) {
                if (grid.at(u, j) > 0.0 && !seen[R + j]) {
                    seen[R + j] = 1;
                    stack.push_back(R + j);
                }
            }
        } else {
            for (std::size_t i = 0; i < R; ++i) {
                if (grid.at(i, u - R) > 0.0 && !seen[i]) {
                    seen[i] = 1;
                    stack.push_back(i);
                }
            }
        }
    }
    std::vector<std::size_t> isolated;
    for (std::size_t u = 0; u < n; ++u) {
        if (!seen[u]) {
            isolated.push_back(u);
        }
    }
    if (!isolated.empty()) {
        std::ostringstream msg;
        msg << "sneak_solve: singular system, floating component {";
        for (std::size_t k = 0; k < isolated.size(); ++k) {
            msg << (k ? ", " : "") << line_name(isolated[k], R);
        }
        msg << "} has no conductive path to a driven line";
        throw SolverError(msg.str());
    }

    std::vector<std::size_t> free_index(n, n);
    std::vector<std::size_t> free_nodes;
    for (std::size_t u = 0; u < n; ++u) {
        if (u != src && u != sink) {
            free_index[u] = free_nodes.size();
            free_nodes.push_back(u);
        }
    }

    std::vector<double> v(n, 0.0);
    v[src] = voltage;
    const auto m = static_cast<Eigen::Index>(free_nodes.size());
    if (m > 0) {
        // Reduced Laplacian G_ff v_f = -G_fd v_d.
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
        for (std::size_t i = 0; i < R; ++i) {
            for (std::size_t j = 0; j < C; ++j) {
                const double g = grid.at(i, j);
                if (g == 0.0) {
                    continue;
                }
                const std::size_t a = i;
                const std::size_t c = R + j;
                const std::size_t fa = free_index[a];
                const std::size_t fc = free_index[c];
                if (fa < n) {
                    G(fa, fa) += g;
                    if (fc < n) {
                        G(fa, fc) -= g;
                    } else {
                        b(fa) += g * v[c];
                    }
                }
                if (fc < n) {
                    G(fc, fc) += g;
                    if (fa < n) {
                        G(fc, fa) -= g;
                    } else {
                        b(fc) += g * v[a];
                    }
                }
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(G);
        if (llt.info() != Eigen::Success) {
            throw SolverError("sneak_solve: reduced conductance matrix is not positive definite");
        }
        const Eigen::VectorXd x = llt.solve(b);
        for (Eigen::Index k = 0; k < m; ++k) {
            v[free_nodes[static_cast<std::size_t>(k)]] = x(k);
        }
    }

    SneakSolution sol;
    sol.row_voltages.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(R));
    sol.col_voltages.assign(v.begin() + static_cast<std::ptrdiff_t>(R), v.end());
    sol.currents.resize(R * C);
    std::vector<double> net(n, 0.0); // current leaving each node through the cells
    double scale = 0.0;
    for (std::size_t i = 0; i < R; ++i) {
        for (std::size_t j = 0; j < C; ++j) {
            const double I = grid.at(i, j) * (v[i] - v[R + j]);
            sol.currents[i * C + j] = I;
            net[i] += I;
            net[R + j] -= I;
            scale = std::max(scale, std::abs(I));
        }
    }
    sol.source_current = net[src];
    for (std::size_t u : free_nodes) {
        sol.residual = std::max(sol.residual, std::abs(net[u]));
    }
    if (sol.residual > 1e-9 * std::max(scale, std::abs(sol.source_current)) && scale > 0.0) {
        throw SolverError("sneak_solve: KCL residual " + std::to_string(sol.residual) + " A exceeds tolerance");
    }
    return sol;
}

SneakSolution sneak_solve(const CrossbarSpec& spec, std::size_t driven_row, std::size_t driven_col, double voltage)
{
    return sneak_solve(conductances(spec), driven_row, driven_col, voltage);
}

std::vector<CellState> read_state_grid(const std::string& text, std::size_t& rows, std::size_t& cols)
{
    std::vector<CellState> states;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    rows = 0;
    cols = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::size_t count = 0;
        std::istringstream cells(line);
        std::string tok;
        while (std::getline(cells, tok, ',')) {
            const auto a = tok.find_first_not_of(" \t");
            const auto z = tok.find_last_not_of(" \t");
            tok = a == std::string::npos ? "" : tok.substr(a, z - a + 1);
            if (tok == "P") {
                states.push_back(CellState::P);
            } else if (tok == "AP") {
                states.push_back(CellState::AP);
            } else if (tok == "X") {
                states.push_back(CellState::open);
            } else {
                throw InvalidParameter("state grid line " + std::to_string(line_no) + ": expected P, AP or X, got '" +
                                       tok + "'");
            }
            ++count;
        }
        if (cols == 0) {
            cols = count;
        } else if (count != cols) {
            throw InvalidParameter("state grid line " + std::to_string(line_no) + ": " + std::to_string(count) +
                                   " cells, expected " + std::to_string(cols));
        }
        ++rows;
    }
    if (rows == 0) {
        throw InvalidParameter("state grid is empty");
    }
    return states;
}

std::string write_state_grid(const CrossbarSpec& spec)
{
    std::string out;
    for (std::size_t i = 0; i < spec.rows; ++i) {
        for (std::size_t j = 0; j < spec.cols; ++j) {
            out += (j ? "," : "") + to_string(spec.state(i, j));
        }
        out += '\n';
    }
    return out;
}

} // namespace vcma
