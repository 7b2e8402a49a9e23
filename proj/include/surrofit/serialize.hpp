#ifndef SURROFIT_SERIALIZE_HPP
#define SURROFIT_SERIALIZE_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "surrofit/surrogate.hpp"
#include "surrofit/transform.hpp"

namespace surrofit {

using json = nlohmann::json;

inline json to_json(const DomainTransform& t) {
    std::vector<double> rot;
    rot.reserve(static_cast<std::size_t>(t.dim) * t.dim);
    for (int i = 0; i < t.dim; ++i)
        for (int j = 0; j < t.dim; ++j) rot.push_back(t.rotation(i, j));
    return json{{"dim", t.dim},
                {"rotation", rot},  // row-major
                {"scales", std::vector<double>(t.scales.begin(), t.scales.end())},
                {"provenance", to_string(t.provenance)},
                {"degenerate", t.degenerate}};
}

inline DomainTransform transform_from_json(const json& j) {
    DomainTransform t;
    t.dim = j.at("dim").get<int>();
    const auto rot = j.at("rotation").get<std::vector<double>>();
    const auto sc = j.at("scales").get<std::vector<double>>();
    if (t.dim < 1 || rot.size() != static_cast<std::size_t>(t.dim) * t.dim ||
        sc.size() != static_cast<std::size_t>(t.dim))
        throw InvalidArgumentError("transform_from_json: inconsistent sizes");
    t.rotation.resize(t.dim, t.dim);
    for (int i = 0; i < t.dim; ++i)
        for (int j2 = 0; j2 < t.dim; ++j2) t.rotation(i, j2) = rot[i * t.dim + j2];
    t.scales = Eigen::Map<const Vector>(sc.data(), t.dim);
    t.provenance = provenance_from_string(j.at("provenance").get<std::string>());
    t.degenerate = j.value("degenerate", false);
    t.validate();
    return t;
}

inline json to_json(const Surrogate& s) {
    json j{{"kind", to_string(s.kind)},
           {"flexibility", s.flexibility},
           {"transform", to_json(s.transform)},
           {"weights", std::vector<double>(s.weights.begin(), s.weights.end())}};
    if (s.centers.size() > 0) {
        std::vector<double> c;
        c.reserve(static_cast<std::size_t>(s.centers.size()));
        for (Eigen::Index i = 0; i < s.centers.rows(); ++i)
            for (Eigen::Index k = 0; k < s.centers.cols(); ++k) c.push_back(s.centers(i, k));
        j["centers"] = c;  // row-major, flexibility x dim
    }
    switch (s.kind) {
        case SurrogateKind::Polynomial:
        case SurrogateKind::GePolynomial:
            j["order"] = s.order;
            break;
        case SurrogateKind::Rbf:
        case SurrogateKind::GeRbf:
            j["epsilon"] = s.epsilon;
            break;
        case SurrogateKind::Kriging:
            j["eps_vector"] = std::vector<double>(s.eps_vector.begin(), s.eps_vector.end());
            j["mu"] = s.mu;
            j["sigma2"] = s.sigma2;
            break;
    }
    if (s.ridged) j["ridged"] = true;
    if (s.rank_deficient) j["rank_deficient"] = true;
    if (s.nugget) j["nugget"] = true;
    return j;
}

} // namespace surrofit

#endif
