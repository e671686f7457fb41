#include "caaoi/bounds.hpp"

namespace caaoi {

namespace {

void gather(const SystemSpec& spec, Csi csi, const Eigen::VectorXd& w_all,
            const Eigen::VectorXd& p_all, Eigen::VectorXd& w, Eigen::VectorXd& p) {
    const auto idx = spec.indices_with(csi);
    w.resize(static_cast<Eigen::Index>(idx.size()));
    p.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
        w[static_cast<Eigen::Index>(k)] = w_all[static_cast<Eigen::Index>(idx[k])];
        p[static_cast<Eigen::Index>(k)] = p_all[static_cast<Eigen::Index>(idx[k])];
    }
}

} // namespace

BoundReport lower_bound_partial(const SystemSpec& spec) {
    const Eigen::VectorXd w_all = spec.weights();
    const Eigen::VectorXd p_all = spec.probs();
    Eigen::VectorXd w, p;

    BoundReport r;
    gather(spec, Csi::Unknown, w_all, p_all, w, p);
    r.no_csi = lower_bound_no_csi(w, p);
    gather(spec, Csi::Known, w_all, p_all, w, p);
    r.csi = lower_bound_csi(w, p);
    r.value = r.no_csi + r.csi;
    return r;
}

} // namespace caaoi
