#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "mterm/vec.hpp"

namespace mterm {

// Finite dictionary: a list of unit vectors in a common ambient space.
// `spanning` is an optional promise checked by verify_spanning().
struct Dictionary {
    std::size_t ambient_dim = 0;
    std::vector<Vec> atoms;
    std::vector<std::string> labels;
    bool spanning = false;
    nlohmann::json meta;  // builder name, parameters, seed

    std::size_t size() const { return atoms.size(); }

    // Throws if atoms are not unit (1e-12), labels mismatch, or dimensions
    // disagree.
    void validate() const;

    // Rank check via orthonormalization; updates nothing, returns whether
    // the atoms span the ambient space.
    bool verify_spanning() const;
};

nlohmann::json dictionary_to_json(const Dictionary& d);
Dictionary dictionary_from_json(const nlohmann::json& j);

void save_dictionary(const Dictionary& d, const std::string& path);
Dictionary load_dictionary(const std::string& path);

// Non-increasing, non-negative sequence of deviations sigma_0, sigma_1, ...
class DeviationSeq {
public:
    explicit DeviationSeq(std::vector<double> values);

    const std::vector<double>& values() const { return v_; }
    double operator[](std::size_t m) const { return v_[m]; }
    std::size_t size() const { return v_.size(); }

    // Largest N with v[0] > v[1] > ... > v[N] (strictly, beyond tolerance).
    std::size_t strict_prefix() const;

    // True while positive entries keep strictly decreasing, i.e. no
    // positive plateau v[m] == v[m+1] > 0 beyond tolerance tol.
    bool strictly_decreasing_while_positive(double tol = 1e-12) const;

private:
    std::vector<double> v_;
};

}  // namespace mterm
