#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "hardy/exponent.hpp"
#include "hardy/tree.hpp"

namespace hardy {

/// An instance document pairs the exponent with the tree data.
struct ParsedInstance {
    Exponent exponent;
    TreeInstance instance;
};

/// Instance files are JSON objects with fields named exactly
///   p (real > 1), depth (integer >= 0),
/// and either explicit heap-order arrays
///   alpha, lambda, phi  (each of length 2^(depth+1)-1)
/// or a generator block
///   family ("uniform" | "geometric" | "random"), seed (integer, required),
///   saturate_alpha (bool, default true), s (geometric exponent, default 1.5).
/// Explicit arrays and the generator block are mutually exclusive. Generated
/// phi is i.i.d. log-uniform over [1/2, 2]; with saturate_alpha=false the
/// saturating weights are damped by i.i.d. factors in [0.2, 1], so generated
/// instances always satisfy the testing condition.
ParsedInstance parseInstanceText(const std::string& text);
ParsedInstance parseInstanceFile(const std::string& path);

std::string serializeInstance(const TreeInstance& inst, const Exponent& exp);
void writeInstanceFile(const TreeInstance& inst, const Exponent& exp,
                       const std::string& path);

using CsvValue = std::variant<double, long long, std::string>;
using CsvRow = std::vector<CsvValue>;

/// 17-significant-digit doubles, comma separators, newline-terminated lines,
/// header first. Byte-identical across runs for identical inputs.
std::string formatDouble17(double x);
void emitCsv(const std::vector<std::string>& header,
             const std::vector<CsvRow>& rows, std::ostream& out);
void emitCsvFile(const std::vector<std::string>& header,
                 const std::vector<CsvRow>& rows, const std::string& path);

} // namespace hardy
