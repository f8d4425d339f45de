#include "hardy/instance_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hardy/probe.hpp"
#include "hardy/rng.hpp"

namespace hardy {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void parseError(const std::string& what) {
    throw std::invalid_argument("instance parse error: " + what);
}

std::vector<double> numberArray(const json& j, const char* field, std::size_t expected,
                                int depth) {
    if (!j.is_array()) parseError(std::string("field '") + field + "' must be an array");
    if (j.size() != expected)
        parseError(std::string("field '") + field + "' has length " + std::to_string(j.size()) +
                   ", expected " + std::to_string(expected) + " for depth " +
                   std::to_string(depth));
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& x : j) {
        if (!x.is_number()) parseError(std::string("field '") + field + "' holds a non-number");
        out.push_back(x.get<double>());
    }
    return out;
}

ParsedInstance fromGenerator(double p, int depth, const json& doc) {
    if (!doc.contains("seed") || !doc["seed"].is_number_integer() ||
        (doc["seed"].is_number_integer() && doc["seed"].get<long long>() < 0))
        parseError("generator block requires a nonnegative integer 'seed'");
    const std::uint64_t seed = doc["seed"].get<std::uint64_t>();
    if (!doc["family"].is_string()) parseError("field 'family' must be a string");
    const LambdaFamily family = familyFromName(doc["family"].get<std::string>());
    const double s = doc.value("s", 1.5);
    const bool saturate = doc.value("saturate_alpha", true);

    const Exponent exp(p);
    const std::size_t n = nodeCountForDepth(depth);
    std::vector<double> lambda = makeLambdaFamily(family, depth, s, seed);
    std::vector<double> alpha = saturatingAlpha(depth, lambda, exp);
    if (!saturate) {
        // Damped saturation keeps the testing condition while varying alpha.
        for (std::size_t k = 0; k < n; ++k) {
            Stream st(seed, 1, k + 1);
            alpha[k] *= st.uniform(0.2, 1.0);
        }
    }
    std::vector<double> phi(n);
    for (std::size_t k = 0; k < n; ++k) {
        Stream st(seed, 2, k + 1);
        phi[k] = st.logUniform(0.5, 2.0);
    }
    return ParsedInstance{exp, TreeInstance::build(depth, std::move(alpha), std::move(lambda),
                                                   std::move(phi))};
}

} // namespace

ParsedInstance parseInstanceText(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        parseError(e.what());
    }
    if (!doc.is_object()) parseError("document must be a JSON object");
    if (!doc.contains("p") || !doc["p"].is_number()) parseError("missing numeric field 'p'");
    if (!doc.contains("depth") || !doc["depth"].is_number_integer())
        parseError("missing integer field 'depth'");
    const double p = doc["p"].get<double>();
    const int depth = doc["depth"].get<int>();

    const bool hasArrays = doc.contains("alpha") || doc.contains("lambda") || doc.contains("phi");
    const bool hasFamily = doc.contains("family");
    if (hasArrays && hasFamily)
        parseError("explicit sequences and a generator block are mutually exclusive");
    if (hasFamily) return fromGenerator(p, depth, doc);

    for (const char* field : {"alpha", "lambda", "phi"})
        if (!doc.contains(field)) parseError(std::string("missing field '") + field + "'");
    const std::size_t n = nodeCountForDepth(depth);
    std::vector<double> alpha = numberArray(doc["alpha"], "alpha", n, depth);
    std::vector<double> lambda = numberArray(doc["lambda"], "lambda", n, depth);
    std::vector<double> phi = numberArray(doc["phi"], "phi", n, depth);
    return ParsedInstance{Exponent(p), TreeInstance::build(depth, std::move(alpha),
                                                           std::move(lambda), std::move(phi))};
}

ParsedInstance parseInstanceFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open instance file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parseInstanceText(ss.str());
}

std::string serializeInstance(const TreeInstance& inst, const Exponent& exp) {
    json doc;
    doc["p"] = exp.p;
    doc["depth"] = inst.depth();
    doc["alpha"] = inst.alphas();
    doc["lambda"] = inst.lambdas();
    doc["phi"] = inst.phis();
    return doc.dump(2) + "\n";
}

void writeInstanceFile(const TreeInstance& inst, const Exponent& exp, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write instance file '" + path + "'");
    out << serializeInstance(inst, exp);
}

std::string formatDouble17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void emitCsv(const std::vector<std::string>& header, const std::vector<CsvRow>& rows,
             std::ostream& out) {
    for (std::size_t c = 0; c < header.size(); ++c)
        out << (c ? "," : "") << header[c];
    out << "\n";
    for (const CsvRow& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("csv row width " + std::to_string(row.size()) +
                                        " does not match header width " +
                                        std::to_string(header.size()));
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ",";
            if (const double* d = std::get_if<double>(&row[c]))
                out << formatDouble17(*d);
            else if (const long long* i = std::get_if<long long>(&row[c]))
                out << *i;
            else
                out << std::get<std::string>(row[c]);
        }
        out << "\n";
    }
}

void emitCsvFile(const std::vector<std::string>& header, const std::vector<CsvRow>& rows,
                 const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write csv file '" + path + "'");
    emitCsv(header, rows, out);
}

} // namespace hardy
