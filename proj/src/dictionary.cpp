#include "mterm/dictionary.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mterm/numcore.hpp"

namespace mterm {

void Dictionary::validate() const {
    if (labels.size() != atoms.size())
        throw std::invalid_argument("Dictionary: labels/atoms size mismatch");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].dim() != ambient_dim)
            throw std::invalid_argument("Dictionary: atom dimension mismatch");
        if (std::abs(atoms[i].norm() - 1.0) > 1e-12)
            throw std::invalid_argument("Dictionary: atom '" + labels[i] +
                                        "' is not unit norm");
    }
}

bool Dictionary::verify_spanning() const {
    return orthonormalize(ambient_dim, atoms).dim() == ambient_dim;
}

nlohmann::json dictionary_to_json(const Dictionary& d) {
    nlohmann::json j;
    j["ambient_dim"] = d.ambient_dim;
    nlohmann::json atoms = nlohmann::json::array();
    for (const Vec& a : d.atoms) atoms.push_back(a.coords());
    j["atoms"] = std::move(atoms);
    j["labels"] = d.labels;
    j["spanning"] = d.spanning;
    j["meta"] = d.meta.is_null() ? nlohmann::json::object() : d.meta;
    return j;
}

Dictionary dictionary_from_json(const nlohmann::json& j) {
    Dictionary d;
    d.ambient_dim = j.at("ambient_dim").get<std::size_t>();
    for (const auto& row : j.at("atoms"))
        d.atoms.emplace_back(row.get<std::vector<double>>());
    d.labels = j.at("labels").get<std::vector<std::string>>();
    d.spanning = j.value("spanning", false);
    d.meta = j.value("meta", nlohmann::json::object());
    d.validate();
    return d;
}

void save_dictionary(const Dictionary& d, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_dictionary: cannot open " + path);
    f << dictionary_to_json(d).dump(2) << "\n";
}

Dictionary load_dictionary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_dictionary: cannot open " + path);
    nlohmann::json j;
    f >> j;
    return dictionary_from_json(j);
}

DeviationSeq::DeviationSeq(std::vector<double> values) : v_(std::move(values)) {
    if (v_.empty()) throw std::invalid_argument("DeviationSeq: empty");
    for (std::size_t i = 0; i < v_.size(); ++i) {
        if (!(v_[i] > -1e-12))
            throw std::invalid_argument("DeviationSeq: negative entry");
        if (v_[i] < 0.0) v_[i] = 0.0;
        if (i > 0 && v_[i] > v_[i - 1] + 1e-12)
            throw std::invalid_argument("DeviationSeq: increasing entries");
    }
}

std::size_t DeviationSeq::strict_prefix() const {
    std::size_t n = 0;
    while (n + 1 < v_.size() && v_[n + 1] < v_[n] - 1e-12) ++n;
    return n;
}

bool DeviationSeq::strictly_decreasing_while_positive(double tol) const {
    for (std::size_t i = 0; i + 1 < v_.size(); ++i) {
        if (v_[i] > tol && v_[i + 1] > v_[i] - tol && v_[i + 1] > tol)
            return false;
    }
    return true;
}

}  // namespace mterm
