#pragma once

#include "cwkb/limits.hpp"
#include "cwkb/spectrum.hpp"
#include "cwkb/stokes.hpp"
#include "cwkb/zeros.hpp"

#include <string>
#include <vector>

namespace cwkb {

struct ExportMeta {
    std::string command;
    std::string digest;     // config digest, hex
    std::string potential;  // canonical potential description
};

// Exports are pure functions of their inputs: no timestamps, fixed number
// formatting (shortest round-trip for JSON, %.17g for CSV).
std::string graph_json(const StokesGraph& g, const ExportMeta& meta);
std::string eigen_csv(const std::vector<EigenRecord>& recs, const RealLayout& lay, const ExportMeta& meta);
// comparison: how the zeros were compared with predicted lines (empty: omitted)
std::string zeroset_json(const ZeroSet& zs, const ExportMeta& meta, const std::string& comparison = "");
std::string measure_csv(const MeasureReport& rep, const ExportMeta& meta);
std::string measure_json(const MeasureReport& rep, const std::vector<PredictedZeroLine>& lines,
                         const std::vector<std::pair<std::string, LineFit>>& fits, const ExportMeta& meta);
std::string density_csv(const DensityReport& rep, const ExportMeta& meta);
std::string density_json(const DensityReport& rep, const DoubleWellData& d, const ExportMeta& meta);
std::string calibration_json(const std::array<double, 4>& before, const std::array<double, 4>& after,
                             double target, double achieved, const ExportMeta& meta);

// writes atomically enough for our purposes; throws std::runtime_error on IO failure
void write_file(const std::string& path, const std::string& content);

}  // namespace cwkb
