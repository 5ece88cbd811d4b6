#pragma once

#include <optional>
#include <ostream>
#include <string_view>

#include "dnnmodel/energy.hpp"
#include "dnnmodel/kernels.hpp"
#include "dnnmodel/stats.hpp"

namespace dnnmodel::report {

enum class Format { Table, Csv, Json };

std::optional<Format> parse_format(std::string_view s);

/// CSV columns: layer, kind, weights, macs, di, dw, do; the last row is the network total.
void write_stats(std::ostream& os, const NetworkStats& stats, Format format);

/// CSV columns: layer, dataflow, type, level, energy. Compute energy uses type "compute", level "mac".
void write_energy(std::ostream& os, const NetworkEnergy& energy, Format format);

void write_comparison(std::ostream& os, const ComparisonReport& cmp, Format format);

void write_mult_counts(std::ostream& os, std::span<const MultCount> counts, Format format);

}  // namespace dnnmodel::report
