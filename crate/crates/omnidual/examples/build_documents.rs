//! Writes the example instance documents next to this file.
//!
//!     cargo run --example build_documents

use std::path::Path;

use omnidual::cli_io::{ComposeTask, DocumentBuilder, NormalFormTask, PullbackTask};
use omnidual::der_calculus::{Chart, FormField};
use omnidual::dual_pairs::{
    catalog, exact_form, form2, lcps_split, pullback_slice, CompositionSign, DualPairInstance,
};
use omnidual::exact_scalars::{PolyFn, Scalar};
use omnidual::linalg::Matrix;
use omnidual::omni_fiber::Mode;
use omnidual::structures::{LBMorphism, StructureSpec};

fn write(dir: &Path, name: &str, b: DocumentBuilder) {
    let doc = b.build().unwrap_or_else(|e| panic!("{name}: {e}"));
    std::fs::write(dir.join(format!("{name}.json")), doc.serialize()).unwrap();
}

fn jacobi(names: &[&str]) -> Chart {
    Chart::new(names.iter().copied(), Mode::Jacobi).unwrap()
}

fn product() -> DualPairInstance {
    catalog(Mode::Jacobi)
        .unwrap()
        .into_iter()
        .find(|e| e.name == "product_line_line")
        .unwrap()
        .instance
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    let p = product();

    let mut b = DocumentBuilder::new(7, 5);
    b.instance("product", &p);
    write(&dir, "product_pass", b);

    let cross = exact_form(p.apex(), &["0", "y", "0", "0"]).unwrap();
    let bent = DualPairInstance::new(
        p.apex().clone(),
        p.form().add(&cross),
        p.legs().clone(),
        p.maps().clone(),
    )
    .unwrap();
    let mut b = DocumentBuilder::new(7, 5);
    b.instance("cross_term", &bent);
    write(&dir, "fail_orthogonality", b);

    let c = jacobi(&["x", "y"]);
    let zero = StructureSpec::graph_bider(c.clone(), Matrix::zeros(3, 3)).unwrap();
    let id = LBMorphism::identity(&c);
    let ident = DualPairInstance::new(
        c.clone(),
        FormField::zero(c.model(), 2),
        [zero.clone(), zero],
        [id.clone(), id],
    )
    .unwrap();
    let mut b = DocumentBuilder::new(7, 5);
    b.instance("identity", &ident);
    write(&dir, "fail_rank", b);

    let c0 = p.legs()[0].chart().clone();
    let doubled = form2(&c0, &[(0, 1, "2")]).unwrap();
    let legs = [
        StructureSpec::graph_form(c0, doubled).unwrap(),
        p.legs()[1].clone(),
    ];
    let wrong =
        DualPairInstance::new(p.apex().clone(), p.form().clone(), legs, p.maps().clone()).unwrap();
    let mut b = DocumentBuilder::new(7, 5);
    b.instance("wrong_leg", &wrong);
    write(&dir, "fail_forward", b);

    let (cy, cz) = (p.legs()[0].chart().clone(), p.legs()[1].chart().clone());
    let wy = form2(&cy, &[(0, 1, "1")]).unwrap();
    let wz = form2(&cz, &[(0, 1, "1 + z^2")]).unwrap();
    let mirror = omnidual::dual_pairs::product_pair(&cz, &wz, &cy, &wy).unwrap();
    let mut b = DocumentBuilder::new(7, 5);
    b.instance("product", &p);
    b.instance("mirror", &mirror);
    b.raw_mut().compose.push(ComposeTask {
        name: "product_then_mirror".into(),
        first: "product".into(),
        second: "mirror".into(),
        sign: CompositionSign::Plus,
    });
    write(&dir, "composition", b);

    let split = lcps_split(2, Some(&["0", "x1", "0"])).unwrap();
    let slice = pullback_slice(&split).unwrap();
    let mut b = DocumentBuilder::new(7, 5);
    b.instance("split", &split);
    b.morphism("slice", &slice);
    b.morphism("identity", &LBMorphism::identity(split.legs()[1].chart()));
    b.raw_mut().pullbacks.push(PullbackTask {
        name: "split_along_x2_zero".into(),
        instance: "split".into(),
        maps: ["slice".into(), "identity".into()],
    });
    write(&dir, "pullback", b);

    let m = jacobi(&["x", "y"]);
    let n = jacobi(&["x"]);
    let mut j = Matrix::zeros(3, 3);
    j.set(1, 2, PolyFn::one());
    j.set(2, 1, PolyFn::int(-1));
    let mut b = DocumentBuilder::new(7, 5);
    b.chart("M", &m);
    b.chart("N", &n);
    b.structure(
        "line_bracket",
        &StructureSpec::graph_bider(m.clone(), j).unwrap(),
    );
    b.morphism(
        "inclusion",
        &LBMorphism::new(
            n,
            m.clone(),
            vec![PolyFn::var(0), PolyFn::zero()],
            PolyFn::one(),
        )
        .unwrap(),
    );
    b.morphism("tubular", &LBMorphism::identity(&m));
    b.form("B", &m, &form2(&m, &[(1, 2, "1")]).unwrap());
    let pts = [[0, 0], [2, -1], [-3, 5]]
        .iter()
        .map(|p| p.iter().map(|&v| Scalar::from_int(v)).collect())
        .collect();
    b.raw_mut().normal_forms.push(NormalFormTask {
        name: "line_bracket_along_y_zero".into(),
        structure: "line_bracket".into(),
        phi: "inclusion".into(),
        psi: "tubular".into(),
        b: "B".into(),
        points: pts,
    });
    write(&dir, "normal_form", b);

    let mut b = DocumentBuilder::new(7, 4);
    for mode in [Mode::Jacobi, Mode::Dirac] {
        for e in catalog(mode).unwrap() {
            b.instance(&e.name, &e.instance);
            b.leaf_task(&e.name, &e.leaf);
        }
    }
    write(&dir, "corpus", b);
}
