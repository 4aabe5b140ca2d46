#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vcma/device.hpp"
#include "vcma/waveform.hpp"

namespace vcma {

/// `open` is a broken cell that conducts nothing ("X" in state grids).
enum class CellState { P, AP, open };

std::string to_string(CellState state);

/// R x C array of cells sharing one DeviceParams; states row-major.
struct CrossbarSpec {
    std::size_t rows = 1;
    std::size_t cols = 1;
    std::vector<CellState> states;
    DeviceParams params;

    static CrossbarSpec uniform(std::size_t rows, std::size_t cols, CellState state, const DeviceParams& params = {});

    /// Throws InvalidParameter on zero dimensions or a state array of the wrong size.
    void validate() const;

    CellState state(std::size_t row, std::size_t col) const { return states[row * cols + col]; }
    double resistance(std::size_t row, std::size_t col) const;
};

enum class CellClass { selected, half_selected, unselected };

struct ClassCounts {
    std::size_t selected = 0;
    std::size_t half_selected = 0;
    std::size_t unselected = 0;

    std::size_t total() const { return selected + half_selected + unselected; }
};

struct Classification {
    ClassCounts counts;
    std::vector<CellClass> membership; // row-major
};

/// V/2 scheme classes for a write to (row, col). Throws InvalidParameter out of range.
Classification classify(const CrossbarSpec& spec, std::size_t row, std::size_t col);

struct DisturbStats {
    std::size_t half_select_events = 0; // per cell over a whole-array write, R + C - 2
    double per_cell = 0.0;              // 1 - (1 - p_half)^(R + C - 2)
    double expected_disturbed = 0.0;    // R C per_cell
    double expected_failed = 0.0;       // R C (1 - p_sel)
};

/// Expected errors of a sequential whole-array write, one target at a time.
DisturbStats write_disturb(const CrossbarSpec& spec, double p_sel, double p_half);

enum class WriteScheme { half_voltage, floating };

std::string to_string(WriteScheme scheme);
WriteScheme parse_write_scheme(const std::string& text);

struct WriteRequest {
    std::size_t row = 0;
    std::size_t col = 0;
    Waveform waveform = vcma_pulse(0.7, 1.8e-9);
    WriteScheme scheme = WriteScheme::half_voltage;
};

struct EnergyBreakdown {
    double selected = 0.0;
    double half_selected = 0.0;
    double unselected = 0.0;
    double total = 0.0;
};

/// Joule energy dissipated in the cells during the write, J. Cell resistances
/// are taken from the pre-write state. Under the floating scheme the cell
/// drops come from the nodal solution, and the class labels follow classify.
EnergyBreakdown write_energy(const CrossbarSpec& spec, const WriteRequest& request);

/// Cell conductances (S), row-major; zero marks an open cell.
struct ConductanceGrid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> g;

    double at(std::size_t row, std::size_t col) const { return g[row * cols + col]; }
};

ConductanceGrid conductances(const CrossbarSpec& spec);

struct SneakSolution {
    std::vector<double> row_voltages;
    std::vector<double> col_voltages;
    std::vector<double> currents; // row-major, row line to column line
    double source_current = 0.0;  // into the driven row
    double residual = 0.0;        // max KCL error on the floating lines, A
};

/// Floating-line nodal analysis: row `driven_row` held at `voltage`, column
/// `driven_col` at 0, every other line floating. Throws SolverError when a
/// group of floating lines has no conductive path to a driven line.
SneakSolution sneak_solve(const ConductanceGrid& grid, std::size_t driven_row, std::size_t driven_col,
                          double voltage);

SneakSolution sneak_solve(const CrossbarSpec& spec, std::size_t driven_row, std::size_t driven_col,
                          double voltage);

/// Reads a grid of P/AP/X tokens, one row per line; '#' lines are skipped.
std::vector<CellState> read_state_grid(const std::string& text, std::size_t& rows, std::size_t& cols);
std::string write_state_grid(const CrossbarSpec& spec);

} // namespace vcma
