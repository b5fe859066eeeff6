// Command-line front end: segmentation and geometric model fitting with
// standard, target-volume, and entropy-corrected likelihood energies.

#include <CLI11.hpp>
#include <iostream>

#include "volcut/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"volcut: discrete energy minimization with volume-aware likelihoods"};
    app.require_subcommand(1);

    volcut::SegmentArgs seg;
    auto* s = app.add_subcommand("segment", "segment an image by block-coordinate descent");
    s->add_option("--image", seg.image, "input image (binary PGM or PPM)")->required();
    s->add_option("--boxes", seg.boxes, "init boxes file (outer/inner)");
    s->add_option("--labels", seg.labels, "init label mask (PGM)");
    s->add_option("--gt", seg.gt, "ground-truth mask (PGM)");
    s->add_option("--out", seg.out, "output directory");
    s->add_option("--variant", seg.variant, "standard | fixed-w | bound | high-order");
    s->add_option("--model", seg.model, "auto | histogram | gaussian");
    s->add_option("--w", seg.w, "target weights for fixed-w")->delimiter(',');
    s->add_option("--lambda", seg.lambda, "smoothness strength");
    s->add_option("--lambda-sweep", seg.lambda_sweep, "lambda values to sweep")->delimiter(',');
    s->add_option("--gamma", seg.gamma, "entropy weight");
    s->add_option("--label-cost", seg.label_cost, "cost per active label");
    s->add_option("--outlier-cost", seg.outlier_cost, "cost per outlier datum");
    s->add_option("--bins", seg.bins, "histogram bins per channel");
    s->add_option("--sigma", seg.sigma, "gaussian model sigma");
    s->add_option("--breakpoints", seg.breakpoints, "entropy approximation breakpoints");
    s->add_option("--max-iters", seg.max_iters, "outer iteration cap");
    s->add_option("--seed", seg.seed, "random seed");
    s->add_flag("--no-contrast", seg.no_contrast, "plain Potts weights");

    volcut::FitLinesArgs fl;
    auto* l = app.add_subcommand("fitlines", "multi-line fitting with PEARL");
    l->add_option("--points", fl.points, "points CSV (x,y)");
    l->add_flag("--synthesize", fl.synthesize, "generate the synthetic line dataset");
    l->add_option("--lines", fl.lines, "number of synthetic lines");
    l->add_option("--probs", fl.probs, "per-line sampling probabilities")->delimiter(',');
    l->add_option("--inliers", fl.inliers, "synthetic inlier count");
    l->add_option("--outliers", fl.outliers, "synthetic outlier count");
    l->add_option("--out", fl.out, "output directory");
    l->add_option("--variant", fl.variant, "fixed-w | high-order");
    auto* fw = l->add_flag("--fixed-w", "shorthand for --variant fixed-w");
    auto* vw = l->add_flag("--variable-w", "shorthand for --variant high-order");
    l->add_option("--sigma", fl.sigma, "known line noise level");
    l->add_option("--gamma", fl.gamma, "entropy weight");
    l->add_option("--label-cost", fl.label_cost, "label cost h");
    l->add_option("--outlier-cost", fl.outlier_cost, "cost per outlier (default: auto)");
    l->add_option("--proposals", fl.proposals, "number of line proposals");
    l->add_option("--breakpoints", fl.breakpoints, "entropy approximation breakpoints");
    l->add_option("--max-iters", fl.max_iters, "outer iteration cap");
    l->add_option("--seed", fl.seed, "random seed");

    volcut::FitHomographyArgs fh;
    auto* m = app.add_subcommand("fithomography", "multi-homography fitting with PEARL");
    m->add_option("--matches", fh.matches, "matches CSV (x1,y1,x2,y2)");
    m->add_flag("--synthesize", fh.synthesize, "generate the synthetic two-plane dataset");
    m->add_option("--num-matches", fh.num_matches, "synthetic match count");
    m->add_option("--split", fh.split, "synthetic plane split fraction");
    m->add_option("--noise", fh.noise, "synthetic pixel noise");
    m->add_option("--out", fh.out, "output directory");
    m->add_option("--variant", fh.variant, "fixed-w | high-order");
    auto* fw2 = m->add_flag("--fixed-w", "shorthand for --variant fixed-w");
    auto* vw2 = m->add_flag("--variable-w", "shorthand for --variant high-order");
    m->add_option("--lambda", fh.lambda, "smoothness strength");
    m->add_option("--gamma", fh.gamma, "entropy weight");
    m->add_option("--label-cost", fh.label_cost, "label cost h");
    m->add_option("--outlier-cost", fh.outlier_cost, "cost per outlier (default: auto)");
    m->add_option("--hom-sigma", fh.hom_sigma, "fixed model std-dev in pixels");
    m->add_option("--proposals", fh.proposals, "number of homography proposals");
    m->add_option("--breakpoints", fh.breakpoints, "entropy approximation breakpoints");
    m->add_option("--max-iters", fh.max_iters, "outer iteration cap");
    m->add_option("--seed", fh.seed, "random seed");

    volcut::GammaSweepArgs gs;
    auto* g = app.add_subcommand("gamma-sweep", "entropy-weight sweep on one image");
    g->add_option("--image", gs.image, "input grayscale PGM")->required();
    g->add_option("--out", gs.out, "output directory");
    g->add_option("--gammas", gs.gammas, "entropy weights to sweep")->delimiter(',');
    g->add_option("--k-init", gs.k_init, "initial number of models");
    g->add_option("--lambda", gs.lambda, "smoothness strength");
    g->add_option("--sigma", gs.sigma, "gaussian model sigma");
    g->add_option("--label-cost", gs.label_cost, "cost per active label");
    g->add_option("--breakpoints", gs.breakpoints, "entropy approximation breakpoints");
    g->add_option("--max-iters", gs.max_iters, "outer iteration cap");
    g->add_option("--seed", gs.seed, "random seed");
    g->add_flag("--no-contrast", gs.no_contrast, "plain Potts weights");

    volcut::SynthArgs sy;
    auto* y = app.add_subcommand("synth", "write synthetic datasets to files");
    y->add_option("--kind", sy.kind, "bias | regions3 | lines | homography")->required();
    y->add_option("--out", sy.out, "output directory");
    y->add_option("--seed", sy.seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (s->parsed()) return volcut::cmd_segment(seg);
        if (l->parsed()) {
            if (fw->count()) fl.variant = "fixed-w";
            if (vw->count()) fl.variant = "high-order";
            return volcut::cmd_fitlines(fl);
        }
        if (m->parsed()) {
            if (fw2->count()) fh.variant = "fixed-w";
            if (vw2->count()) fh.variant = "high-order";
            return volcut::cmd_fithomography(fh);
        }
        if (g->parsed()) return volcut::cmd_gamma_sweep(gs);
        if (y->parsed()) return volcut::cmd_synth(sy);
    } catch (const volcut::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
