#include "mmdflow/target.hpp"

#include <algorithm>

namespace mmdflow {

Target::Target(Measure nu)
    : measure_(std::move(nu)), hull_(measure_.support_hull()), half_mean_distance_(mmdflow::half_mean_distance(measure_)) {
    if (const auto* d = std::get_if<Measure::Discrete>(&measure_.data())) {
        std::vector<TargetAtom> atoms;
        for (std::size_t k = 0; k < d->x.size(); ++k) atoms.push_back({d->x[k], d->cumulative[k]});
        atoms_ = std::move(atoms);
    }
    for (const Atom& a : measure_.atoms()) atom_locations_.push_back(a.location);

    if (!atom_locations_.empty()) {
        // Flat pieces of Q_nu: no positive lower constant. Q_nu is Lipschitz
        // only if it is constant.
        l_low_q_ = 0.0;
        lip_q_ = atom_locations_.size() == 1 && measure_.atoms().front().mass >= 1.0 ? 0.0 : kInf;
        return;
    }
    l_low_q_ = 1.0 / measure_.sup_density();
    const double inf_density = measure_.inf_density_on_hull();
    lip_q_ = inf_density > 0.0 ? 1.0 / inf_density : kInf;
}

} // namespace mmdflow
