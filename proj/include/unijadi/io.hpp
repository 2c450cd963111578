#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "unijadi/cost.hpp"
#include "unijadi/problems.hpp"
#include "unijadi/solver.hpp"

namespace unijadi {

// Schema violation with the JSON pointer of the offending node.
struct SchemaError : std::runtime_error {
    SchemaError(const std::string& pointer, const std::string& what);
    std::string pointer;
};

// Tensor schema: {"order": d, "dims": [...], "data": [[re, im], ...]} with
// data row-major, last index fastest.
nlohmann::ordered_json tensor_to_json(const ComplexDenseTensor& T);
ComplexDenseTensor tensor_from_json(const nlohmann::json& j, const std::string& pointer);

// Problem schema: {"kind": "squared", "n": n, "terms": [{"t", "alpha",
// "tensor"}, ...]} or {"kind": "trace", "n": n, "d": d, "B": tensor}.
nlohmann::ordered_json problem_to_json(const CostFunction& cost);
CostFunction problem_from_json(const nlohmann::json& j);

nlohmann::ordered_json ground_truth_to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const nlohmann::json& j);

// Canonical serialization (2-space indent, trailing newline): rereading and
// rewriting a file produced here is byte-identical.
void save_json(const std::string& path, const nlohmann::ordered_json& j);
nlohmann::json load_json(const std::string& path);

void save_problem(const std::string& path, const CostFunction& cost);
CostFunction load_problem(const std::string& path);

// Sidecar path for a problem file: <stem>.ground_truth.json next to it.
std::string ground_truth_path_for(const std::string& problem_path);

inline constexpr const char* kTraceCsvHeader =
    "iter,sweep,i,j,f,grad_norm,c,s1,s2,gamma_gap,elapsed_s";

void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace);
void write_trace_jsonl(std::ostream& os, const std::vector<IterationRecord>& trace);

}  // namespace unijadi
