#include "unijadi/io.hpp"

#include <fstream>
#include <sstream>

namespace unijadi {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Shortest representation that parses back to the same double; keeps
// serialized files and traces stable across write/read/write cycles.
std::string num(double v) { return json(v).dump(); }

const json& require(const json& j, const char* key, const std::string& pointer) {
    if (!j.is_object() || !j.contains(key))
        throw SchemaError(pointer + "/" + key, "missing field");
    return j.at(key);
}

int require_int(const json& j, const char* key, const std::string& pointer) {
    const json& v = require(j, key, pointer);
    if (!v.is_number_integer())
        throw SchemaError(pointer + "/" + key, "expected an integer");
    return v.get<int>();
}

double require_number(const json& j, const char* key, const std::string& pointer) {
    const json& v = require(j, key, pointer);
    if (!v.is_number()) throw SchemaError(pointer + "/" + key, "expected a number");
    return v.get<double>();
}

}  // namespace

SchemaError::SchemaError(const std::string& ptr, const std::string& what)
    : std::runtime_error("schema error at '" + (ptr.empty() ? "/" : ptr) + "': " + what),
      pointer(ptr.empty() ? "/" : ptr) {}

ordered_json tensor_to_json(const ComplexDenseTensor& T) {
    ordered_json j;
    j["order"] = T.order();
    j["dims"] = T.dims();
    ordered_json data = ordered_json::array();
    for (std::size_t flat = 0; flat < T.size(); ++flat)
        data.push_back({T[flat].real(), T[flat].imag()});
    j["data"] = std::move(data);
    return j;
}

ComplexDenseTensor tensor_from_json(const json& j, const std::string& pointer) {
    if (!j.is_object()) throw SchemaError(pointer, "expected a tensor object");
    const int order = require_int(j, "order", pointer);
    const json& dims_j = require(j, "dims", pointer);
    if (!dims_j.is_array() || static_cast<int>(dims_j.size()) != order)
        throw SchemaError(pointer + "/dims", "expected an array of length 'order'");
    std::vector<int> dims;
    for (std::size_t k = 0; k < dims_j.size(); ++k) {
        if (!dims_j[k].is_number_integer() || dims_j[k].get<int>() < 1)
            throw SchemaError(pointer + "/dims/" + std::to_string(k),
                              "expected a positive integer");
        dims.push_back(dims_j[k].get<int>());
    }

    ComplexDenseTensor T = [&] {
        try {
            return ComplexDenseTensor(dims);
        } catch (const std::invalid_argument& e) {
            throw SchemaError(pointer + "/dims", e.what());
        }
    }();

    const json& data = require(j, "data", pointer);
    if (!data.is_array() || data.size() != T.size())
        throw SchemaError(pointer + "/data",
                          "expected " + std::to_string(T.size()) + " entries");
    for (std::size_t flat = 0; flat < data.size(); ++flat) {
        const json& cell = data[flat];
        if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
            !cell[1].is_number())
            throw SchemaError(pointer + "/data/" + std::to_string(flat),
                              "expected a [re, im] pair");
        T[flat] = cplx(cell[0].get<double>(), cell[1].get<double>());
    }
    return T;
}

ordered_json problem_to_json(const CostFunction& cost) {
    ordered_json j;
    if (cost.kind() == CostKind::SquaredModuli) {
        j["kind"] = "squared";
        j["n"] = cost.n();
        ordered_json terms = ordered_json::array();
        for (const auto& term : cost.terms()) {
            ordered_json t;
            t["t"] = term.t;
            t["alpha"] = term.alpha;
            t["tensor"] = tensor_to_json(term.tensor);
            terms.push_back(std::move(t));
        }
        j["terms"] = std::move(terms);
    } else {
        j["kind"] = "trace";
        j["n"] = cost.n();
        j["d"] = cost.trace_half_order();
        j["B"] = tensor_to_json(cost.trace_tensor());
    }
    return j;
}

CostFunction problem_from_json(const json& j) {
    if (!j.is_object()) throw SchemaError("", "expected a problem object");
    const json& kind = require(j, "kind", "");
    if (!kind.is_string()) throw SchemaError("/kind", "expected a string");
    const int n = require_int(j, "n", "");

    if (kind == "squared") {
        const json& terms_j = require(j, "terms", "");
        if (!terms_j.is_array() || terms_j.empty())
            throw SchemaError("/terms", "expected a nonempty array");
        std::vector<SquaredTerm> terms;
        for (std::size_t k = 0; k < terms_j.size(); ++k) {
            const std::string ptr = "/terms/" + std::to_string(k);
            const json& term = terms_j[k];
            if (!term.is_object()) throw SchemaError(ptr, "expected a term object");
            SquaredTerm st;
            st.t = require_int(term, "t", ptr);
            st.alpha = require_number(term, "alpha", ptr);
            st.tensor = tensor_from_json(require(term, "tensor", ptr), ptr + "/tensor");
            terms.push_back(std::move(st));
        }
        try {
            return CostFunction::squared_moduli(n, std::move(terms));
        } catch (const std::invalid_argument& e) {
            throw SchemaError("/terms", e.what());
        }
    }
    if (kind == "trace") {
        const int d = require_int(j, "d", "");
        ComplexDenseTensor B = tensor_from_json(require(j, "B", ""), "/B");
        try {
            return CostFunction::trace_form(n, std::move(B), d);
        } catch (const std::invalid_argument& e) {
            throw SchemaError("/B", e.what());
        }
    }
    throw SchemaError("/kind", "unknown kind '" + kind.get<std::string>() + "'");
}

ordered_json ground_truth_to_json(const GroundTruth& truth) {
    ordered_json j;
    if (truth.U_star) {
        const auto& U = *truth.U_star;
        ordered_json u;
        u["order"] = 2;
        u["dims"] = {U.rows(), U.cols()};
        ordered_json data = ordered_json::array();
        for (Eigen::Index r = 0; r < U.rows(); ++r)
            for (Eigen::Index c = 0; c < U.cols(); ++c)
                data.push_back({U(r, c).real(), U(r, c).imag()});
        u["data"] = std::move(data);
        j["U_star"] = std::move(u);
    }
    if (truth.f_star) j["f_star"] = *truth.f_star;
    if (truth.spectra) j["spectra"] = *truth.spectra;
    if (truth.regularity_expected) j["regularity_expected"] = *truth.regularity_expected;
    j["note"] = truth.note;
    return j;
}

GroundTruth ground_truth_from_json(const json& j) {
    if (!j.is_object()) throw SchemaError("", "expected a ground-truth object");
    GroundTruth truth;
    if (j.contains("U_star")) {
        ComplexDenseTensor T = tensor_from_json(j.at("U_star"), "/U_star");
        if (T.order() != 2) throw SchemaError("/U_star", "expected an order-2 tensor");
        truth.U_star = T.as_matrix();
    }
    if (j.contains("f_star")) {
        if (!j.at("f_star").is_number()) throw SchemaError("/f_star", "expected a number");
        truth.f_star = j.at("f_star").get<double>();
    }
    if (j.contains("spectra")) {
        const json& sp = j.at("spectra");
        if (!sp.is_array()) throw SchemaError("/spectra", "expected an array");
        std::vector<std::vector<double>> spectra;
        for (std::size_t k = 0; k < sp.size(); ++k) {
            if (!sp[k].is_array())
                throw SchemaError("/spectra/" + std::to_string(k), "expected an array");
            spectra.push_back(sp[k].get<std::vector<double>>());
        }
        truth.spectra = std::move(spectra);
    }
    if (j.contains("regularity_expected")) {
        if (!j.at("regularity_expected").is_boolean())
            throw SchemaError("/regularity_expected", "expected a boolean");
        truth.regularity_expected = j.at("regularity_expected").get<bool>();
    }
    if (j.contains("note")) {
        if (!j.at("note").is_string()) throw SchemaError("/note", "expected a string");
        truth.note = j.at("note").get<std::string>();
    }
    return truth;
}

void save_json(const std::string& path, const ordered_json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << j.dump(2) << "\n";
    if (!os) throw std::runtime_error("write failed: " + path);
}

json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("failed to parse " + path + ": " + e.what());
    }
}

void save_problem(const std::string& path, const CostFunction& cost) {
    save_json(path, problem_to_json(cost));
}

CostFunction load_problem(const std::string& path) {
    return problem_from_json(load_json(path));
}

std::string ground_truth_path_for(const std::string& problem_path) {
    const std::string suffix = ".json";
    if (problem_path.size() > suffix.size() &&
        problem_path.compare(problem_path.size() - suffix.size(), suffix.size(), suffix) ==
            0)
        return problem_path.substr(0, problem_path.size() - suffix.size()) +
               ".ground_truth.json";
    return problem_path + ".ground_truth.json";
}

void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace) {
    os << kTraceCsvHeader << "\n";
    for (const auto& r : trace) {
        os << r.iter << ',' << r.sweep << ',' << r.i << ',' << r.j << ',' << num(r.f)
           << ',' << num(r.grad_norm) << ',' << num(r.rot.c) << ',' << num(r.rot.s1)
           << ',' << num(r.rot.s2) << ',' << num(r.gamma_gap) << ',' << num(r.elapsed_s)
           << "\n";
    }
}

void write_trace_jsonl(std::ostream& os, const std::vector<IterationRecord>& trace) {
    for (const auto& r : trace) {
        ordered_json j;
        j["iter"] = r.iter;
        j["sweep"] = r.sweep;
        j["i"] = r.i;
        j["j"] = r.j;
        j["f"] = r.f;
        j["grad_norm"] = r.grad_norm;
        j["c"] = r.rot.c;
        j["s1"] = r.rot.s1;
        j["s2"] = r.rot.s2;
        j["gamma_gap"] = r.gamma_gap;
        j["elapsed_s"] = r.elapsed_s;
        os << j.dump() << "\n";
    }
}

}  // namespace unijadi
