#include "mpa/motion_estimation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>

#include "mpa/parallel.hpp"

namespace mpa {

namespace {

bool is_negative_power_of_two(double x) {
    if (x <= 0.0 || x > 1.0) return false;
    int exp = 0;
    const double mant = std::frexp(x, &exp);
    return mant == 0.5 && exp <= 1;
}

using CostFn = std::function<double(double tx, double ty)>;

struct DiamondResult {
    double tx = 0.0;
    double ty = 0.0;
    double cost = 0.0;
};

// Displacements are handled in pixel-equivalent units; the cost function
// applies the plane conversion. Candidates repeat across patterns, so costs
// are cached on the subpel half-step grid.
DiamondResult diamond_search(const CostFn& cost, double range_px, double subpel) {
    const double key_scale = 2.0 / subpel;
    std::map<std::pair<long, long>, double> cache;
    auto eval = [&](double tx, double ty) {
        const std::pair<long, long> key{std::lround(tx * key_scale), std::lround(ty * key_scale)};
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const double c = cost(tx, ty);
        cache.emplace(key, c);
        return c;
    };

    DiamondResult best{0.0, 0.0, eval(0.0, 0.0)};
    auto try_offsets = [&](const std::vector<std::pair<double, double>>& offsets) {
        bool improved = false;
        const double cx = best.tx;
        const double cy = best.ty;
        for (const auto& [ox, oy] : offsets) {
            const double tx = cx + ox;
            const double ty = cy + oy;
            if (std::abs(tx) > range_px || std::abs(ty) > range_px) continue;
            const double c = eval(tx, ty);
            if (c < best.cost) {
                best = {tx, ty, c};
                improved = true;
            }
        }
        return improved;
    };

    static const std::vector<std::pair<double, double>> large = {
        {0, -2}, {-1, -1}, {1, -1}, {-2, 0}, {2, 0}, {-1, 1}, {1, 1}, {0, 2}};
    while (try_offsets(large)) {
    }
    for (double step = 1.0; step >= subpel * (1.0 - 1e-12); step *= 0.5) {
        const std::vector<std::pair<double, double>> small = {
            {0, -step}, {-step, 0}, {step, 0}, {0, step}};
        while (try_offsets(small)) {
        }
    }
    return best;
}

}  // namespace

void SearchConfig::validate() const {
    if (search_range_px <= 0.0) throw std::invalid_argument("search range must be positive");
    if (!is_negative_power_of_two(subpel_precision)) {
        throw std::invalid_argument("subpel precision must be a negative power of two");
    }
}

void IcLkConfig::validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (convergence_epsilon <= 0.0) throw std::invalid_argument("convergence epsilon must be > 0");
    if (step_gain < 1.0) throw std::invalid_argument("step gain must be >= 1");
}

PlaneBlockCoords block_plane_coords(const BlockSpec& block, const MotionPlane& plane,
                                    const FrameGeometry& geom) {
    PlaneBlockCoords out;
    out.plane = plane;
    out.points.resize(static_cast<size_t>(block.size) * block.size);
    bool ok = true;
    int hemisphere = 0;
    for (int r = 0; r < block.size && ok; ++r) {
        for (int c = 0; c < block.size; ++c) {
            const PixelCoord px{static_cast<double>(block.origin_x + c),
                                static_cast<double>(block.origin_y + r)};
            const Eigen::Vector3d rotated = plane.rotation * erp_to_sphere(px, geom);
            if (std::abs(rotated.z()) < kPlaneEpsilon) {
                ok = false;
                break;
            }
            const int hem = rotated.z() > 0.0 ? +1 : -1;
            if (hemisphere == 0) {
                hemisphere = hem;
            } else if (hemisphere != hem) {
                ok = false;
                break;
            }
            out.points[static_cast<size_t>(r) * block.size + c] =
                PlanePoint{rotated.x() / rotated.z(), rotated.y() / rotated.z(), hem};
        }
    }
    if (!ok) {
        out.admissible = false;
        return out;
    }
    out.admissible = true;
    out.hemisphere = hemisphere;

    const double half = 0.5 * block.size - 0.5;
    const PixelCoord center{block.origin_x + half, block.origin_y + half};
    const PlanePoint center_pt = zeta(center, plane, geom);
    out.plane_units_per_px = plane_units_per_pixel(zeta_jacobian(center_pt, plane, geom));
    return out;
}

std::vector<double> block_samples(const Frame& frame, const BlockSpec& block) {
    std::vector<double> out(static_cast<size_t>(block.size) * block.size);
    for (int r = 0; r < block.size; ++r) {
        for (int c = 0; c < block.size; ++c) {
            out[static_cast<size_t>(r) * block.size + c] =
                static_cast<double>(frame.at(block.origin_y + r, block.origin_x + c));
        }
    }
    return out;
}

double block_ssd(const std::vector<double>& tmpl, const std::vector<double>& pred) {
    double acc = 0.0;
    for (size_t i = 0; i < tmpl.size(); ++i) {
        const double e = pred[i] - tmpl[i];
        acc += e * e;
    }
    return acc;
}

namespace {

std::pair<TranslationVector, double> diamond_search_on_coords(
    const std::vector<double>& tmpl, const PlaneBlockCoords& coords, const Frame& reference,
    const SearchConfig& cfg, const FrameGeometry& geom) {
    const double scale = coords.plane_units_per_px;
    const auto cost = [&](double tx_px, double ty_px) {
        const double tx = tx_px * scale;
        const double ty = ty_px * scale;
        double acc = 0.0;
        for (size_t i = 0; i < coords.points.size(); ++i) {
            const PlanePoint& pt = coords.points[i];
            const PixelCoord warped =
                zeta_inv(PlanePoint{pt.x + tx, pt.y + ty, coords.hemisphere}, coords.plane, geom);
            const double e = reference.sample_bilinear(warped) - tmpl[i];
            acc += e * e;
        }
        return acc;
    };
    const DiamondResult res = diamond_search(cost, cfg.search_range_px, cfg.subpel_precision);
    return {TranslationVector{res.tx * scale, res.ty * scale}, res.cost};
}

}  // namespace

std::pair<TranslationVector, double> diamond_search_translational(
    const Frame& tmpl, const BlockSpec& block, const Frame& reference,
    const MotionPlane& plane, const SearchConfig& cfg) {
    cfg.validate();
    if (!tmpl.same_raster(reference)) throw GeometryMismatch("template/reference raster differ");
    const PlaneBlockCoords coords = block_plane_coords(block, plane, tmpl.geometry());
    if (!coords.admissible) {
        throw NearPlaneSingularity("block not admissible on the requested plane");
    }
    const std::vector<double> samples = block_samples(tmpl, block);
    return diamond_search_on_coords(samples, coords, reference, cfg, tmpl.geometry());
}

std::pair<TranslationVector, double> diamond_search_erp(const Frame& tmpl, const BlockSpec& block,
                                                        const Frame& reference,
                                                        const SearchConfig& cfg) {
    cfg.validate();
    if (!tmpl.same_raster(reference)) throw GeometryMismatch("template/reference raster differ");
    const std::vector<double> samples = block_samples(tmpl, block);
    const auto cost = [&](double tx, double ty) {
        double acc = 0.0;
        for (int r = 0; r < block.size; ++r) {
            for (int c = 0; c < block.size; ++c) {
                const PixelCoord px{block.origin_x + c + tx, block.origin_y + r + ty};
                const double e = reference.sample_bilinear(px) -
                                 samples[static_cast<size_t>(r) * block.size + c];
                acc += e * e;
            }
        }
        return acc;
    };
    const DiamondResult res = diamond_search(cost, cfg.search_range_px, cfg.subpel_precision);
    return {TranslationVector{res.tx, res.ty}, res.cost};
}

PlaneSearchResult select_best_plane(const Frame& tmpl, const BlockSpec& block,
                                    const Frame& reference, const SearchConfig& cfg) {
    cfg.validate();
    const std::vector<double> samples = block_samples(tmpl, block);
    std::optional<PlaneSearchResult> best;
    for (PlaneId id : {PlaneId::FrontBack, PlaneId::LeftRight, PlaneId::TopBottom}) {
        const MotionPlane plane = plane_rotation(id);
        const PlaneBlockCoords coords = block_plane_coords(block, plane, tmpl.geometry());
        if (!coords.admissible) continue;
        const auto [t, ssd] = diamond_search_on_coords(samples, coords, reference, cfg, tmpl.geometry());
        if (!best || ssd < best->ssd) {
            best = PlaneSearchResult{plane, t, ssd, coords.hemisphere};
        }
    }
    if (!best) {
        throw NearPlaneSingularity("no admissible motion plane for block");
    }
    return *best;
}

IclkPrecompute iclk_precompute(const Frame& tmpl, const BlockSpec& block,
                               const PlaneBlockCoords& coords, AffineModel model,
                               double damping) {
    if (!coords.admissible) {
        throw NearPlaneSingularity("block not admissible on the requested plane");
    }
    const int n = model == AffineModel::SixParam ? 6 : 4;
    const int bs = block.size;
    const size_t pixels = static_cast<size_t>(bs) * bs;

    IclkPrecompute pre;
    pre.steepest_descent.resize(static_cast<Eigen::Index>(pixels), n);

    const FrameGeometry& geom = tmpl.geometry();
    for (int r = 0; r < bs; ++r) {
        for (int c = 0; c < bs; ++c) {
            const int row = block.origin_y + r;
            const int col = block.origin_x + c;
            const double gu =
                0.5 * (tmpl.sample_wrapped(row, col + 1) - tmpl.sample_wrapped(row, col - 1));
            const double gv =
                0.5 * (tmpl.sample_wrapped(row + 1, col) - tmpl.sample_wrapped(row - 1, col));

            const PlanePoint& pt = coords.points[static_cast<size_t>(r) * bs + c];
            const Eigen::Matrix2d jz = zeta_jacobian(pt, coords.plane, geom);
            // Gradient mapped into plane coordinates.
            const double gx = gu * jz(0, 0) + gv * jz(1, 0);
            const double gy = gu * jz(0, 1) + gv * jz(1, 1);

            Eigen::RowVectorXd sd(n);
            if (model == AffineModel::SixParam) {
                // d(X',Y')/dp at p=0: X' row (X,Y,0,0,1,0), Y' row (0,0,X,Y,0,1)
                sd << gx * pt.x, gx * pt.y, gy * pt.x, gy * pt.y, gx, gy;
            } else {
                // X' row (X,Y,1,0), Y' row (Y,-X,0,1)
                sd << gx * pt.x + gy * pt.y, gx * pt.y - gy * pt.x, gx, gy;
            }
            pre.steepest_descent.row(static_cast<Eigen::Index>(r) * bs + c) = sd;
        }
    }

    Eigen::MatrixXd hessian = pre.steepest_descent.transpose() * pre.steepest_descent;
    hessian.diagonal().array() += damping * hessian.trace() / n;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > 1e12) {
        throw IllConditionedHessian("Hessian condition number beyond 1e12 after damping");
    }
    pre.hessian_inverse = eig.eigenvectors() *
                          eig.eigenvalues().cwiseInverse().asDiagonal() *
                          eig.eigenvectors().transpose();
    return pre;
}

EstimationResult iclk_refine(const Frame& tmpl, const BlockSpec& block, const Frame& reference,
                             const BlockMotion& init, AffineModel model, const IcLkConfig& cfg) {
    cfg.validate();
    if (!tmpl.same_raster(reference)) throw GeometryMismatch("template/reference raster differ");
    if (init.plane == PlaneId::ErpDirect) {
        throw GeometryMismatch("inverse compositional refinement requires a motion plane");
    }

    const MotionPlane plane = plane_rotation(init.plane);
    const FrameGeometry& geom = tmpl.geometry();
    const PlaneBlockCoords coords = block_plane_coords(block, plane, geom);
    const std::vector<double> samples = block_samples(tmpl, block);

    EstimationResult result;
    result.motion = init;

    const auto ssd_of = [&](const BlockMotion& motion) {
        double acc = 0.0;
        for (size_t i = 0; i < coords.points.size(); ++i) {
            const PixelCoord warped = mpa_warp_plane(coords.points[i], motion, plane, geom);
            const double e = reference.sample_bilinear(warped) - samples[i];
            acc += e * e;
        }
        return acc;
    };

    IclkPrecompute pre;
    try {
        pre = iclk_precompute(tmpl, block, coords, model, cfg.hessian_damping);
        result.precompute_count = 1;
    } catch (const NearPlaneSingularity&) {
        result.ssd = std::numeric_limits<double>::infinity();
        return result;
    } catch (const IllConditionedHessian&) {
        result.ssd = coords.admissible ? ssd_of(init) : std::numeric_limits<double>::infinity();
        return result;
    }

    const int n = model == AffineModel::SixParam ? 6 : 4;
    AffineParams p0(model);
    if (model == AffineModel::SixParam) {
        p0.values << 0, 0, 0, 0, init.transform(0, 2), init.transform(1, 2);
    } else {
        p0.values << 0, 0, init.transform(0, 2), init.transform(1, 2);
    }

    BlockMotion current = BlockMotion::affine(init.plane, coords.hemisphere, p0);
    BlockMotion best = current;
    BlockMotion last_observed = current;
    double best_ssd = std::numeric_limits<double>::infinity();

    Eigen::VectorXd g(n);
    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        g.setZero();
        double ssd = 0.0;
        for (size_t i = 0; i < coords.points.size(); ++i) {
            const PixelCoord warped = mpa_warp_plane(coords.points[i], current, plane, geom);
            const double e = reference.sample_bilinear(warped) - samples[i];
            ssd += e * e;
            g += pre.steepest_descent.row(static_cast<Eigen::Index>(i)).transpose() * e;
        }
        result.ssd_history.push_back(ssd);
        result.iterations = iter;
        last_observed = current;
        if (ssd < best_ssd) {
            best_ssd = ssd;
            best = current;
        }

        AffineParams delta(model);
        delta.values = cfg.step_gain * (pre.hessian_inverse * g);
        try {
            current.transform = compose_update(current.transform, delta);
        } catch (const SingularTransform&) {
            break;  // degenerate update, keep the best iterate seen
        }
        if (delta.values.norm() < cfg.convergence_epsilon) {
            result.converged = true;
            break;
        }
    }

    if (cfg.divergence_guard) {
        result.motion = best;
        result.ssd = best_ssd;
    } else {
        result.motion = last_observed;
        result.ssd = result.ssd_history.back();
    }
    return result;
}

FrameEstimate estimate_frame(const Frame& tmpl, const Frame& reference, EstimationMode mode,
                             int block_size, const SearchConfig& search_cfg,
                             const IcLkConfig& iclk_cfg, int threads) {
    search_cfg.validate();
    iclk_cfg.validate();
    if (!tmpl.same_raster(reference)) {
        throw GeometryMismatch("template/reference raster differ");
    }
    const FrameGeometry geom = tmpl.geometry();
    if (geom.width % block_size != 0 || geom.height % block_size != 0) {
        throw GeometryMismatch("frame dimensions must be divisible by the block size");
    }

    FrameEstimate out;
    out.field.geom = geom;
    out.field.block_size = block_size;
    out.field.mode = mode;
    const int bx = geom.width / block_size;
    const int by = geom.height / block_size;
    out.field.blocks.resize(static_cast<size_t>(bx) * by);
    out.results.resize(out.field.blocks.size());

    parallel_for(static_cast<int>(out.field.blocks.size()), threads, [&](int i) {
        const BlockSpec spec((i % bx) * block_size, (i / bx) * block_size, block_size, geom);
        EstimationResult res;
        if (mode == EstimationMode::Tmc) {
            const auto [t, ssd] = diamond_search_erp(tmpl, spec, reference, search_cfg);
            res.motion = BlockMotion::translational(PlaneId::ErpDirect, +1, t);
            res.ssd = ssd;
            res.converged = true;
        } else {
            const PlaneSearchResult plane_best = select_best_plane(tmpl, spec, reference, search_cfg);
            const BlockMotion translational = BlockMotion::translational(
                plane_best.plane.id, plane_best.hemisphere, plane_best.translation);
            if (mode == EstimationMode::MpaTranslational) {
                res.motion = translational;
                res.ssd = plane_best.ssd;
                res.converged = true;
            } else {
                const AffineModel model = mode == EstimationMode::MpaIc6p ? AffineModel::SixParam
                                                                          : AffineModel::FourParam;
                res = iclk_refine(tmpl, spec, reference, translational, model, iclk_cfg);
                if (res.ssd > plane_best.ssd || res.precompute_count == 0) {
                    // Refinement must never lose to its starting point.
                    res.motion = translational;
                    res.ssd = plane_best.ssd;
                }
            }
        }
        out.results[static_cast<size_t>(i)] = std::move(res);
        out.field.blocks[static_cast<size_t>(i)] = out.results[static_cast<size_t>(i)].motion;
    });
    return out;
}

}  // namespace mpa
