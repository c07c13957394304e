#include "dyadic/pipeline.hpp"

#include "dyadic/errors.hpp"

namespace dyadic {

Decomposition decompose(std::shared_ptr<const FiniteSpace> space, const BuildOptions& options) {
    if (!space) throw InputError("decompose needs a space");
    ConstantLedger ledger = derive_constants(space->declared_a0(), options.scale_ratio,
                                             options.ball_factor, options.relaxed);
    const Extent extent = pairwise_extent(*space);
    ScaleLadder ladder = scale_ladder(ledger.scale_ratio, extent.diameter, extent.min_separation);
    auto nets = build_nets(*space, ladder, options.order, options.nested);
    auto tree = link_generations(*space, nets, ledger);
    return materialize(std::move(space), ladder, std::move(ledger), std::move(nets), std::move(tree));
}

} // namespace dyadic
