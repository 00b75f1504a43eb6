//! One-vs-rest logistic regression trained by full-batch gradient descent.
//!
//! Each class gets an independent binary model fit on the L2-regularized
//! mean negative log-likelihood (the bias is not penalized). A step that
//! would raise the loss is rejected and the learning rate halved, so the
//! recorded loss sequence never increases.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embed::check_header;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numerics::Matrix;

const MODEL_HEADER: &str = "qembed-logreg-model";
const VERSION: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyperparams {
    /// L2 strength on the weights (not the bias).
    pub l2: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Stop once the gradient norm falls below this.
    pub tol: f64,
    pub seed: u64,
    /// Half-width of the uniform initial weights; 0 starts from zero.
    pub init_scale: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            l2: 1e-4,
            learning_rate: 0.1,
            max_epochs: 1000,
            tol: 1e-6,
            seed: 42,
            init_scale: 0.0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(Error::invalid("l2 strength must be finite and >= 0"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning rate must be > 0"));
        }
        if self.max_epochs == 0 {
            return Err(Error::invalid("max epochs must be positive"));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::invalid("tolerance must be > 0"));
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return Err(Error::invalid("init scale must be finite and >= 0"));
        }
        Ok(())
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
#[inline]
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Loss and gradient of one binary problem. `params` holds the feature
/// weights followed by the bias; `targets` are 0 or 1.
pub fn binary_objective(x: &Matrix, targets: &[f64], params: &[f64], l2: f64) -> (f64, Vec<f64>) {
    let d = x.cols();
    let n = x.rows() as f64;
    let (w, b) = params.split_at(d);
    let mut loss = 0.0;
    let mut grad = vec![0.0; d + 1];
    for (i, &y) in targets.iter().enumerate() {
        let row = x.row(i);
        let z = row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() + b[0];
        loss += softplus(z) - y * z;
        let r = sigmoid(z) - y;
        for (g, a) in grad.iter_mut().zip(row) {
            *g += r * a;
        }
        grad[d] += r;
    }
    loss /= n;
    for g in &mut grad {
        *g /= n;
    }
    let penalty: f64 = w.iter().map(|c| c * c).sum();
    loss += 0.5 * l2 * penalty;
    for (g, c) in grad.iter_mut().zip(w) {
        *g += l2 * c;
    }
    (loss, grad)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinaryFit {
    /// Feature weights followed by the bias.
    pub params: Vec<f64>,
    pub epochs: usize,
    /// Loss before the first step and after every accepted step.
    pub losses: Vec<f64>,
    pub converged: bool,
}

pub fn fit_binary(x: &Matrix, targets: &[f64], hp: &Hyperparams, seed: u64) -> Result<BinaryFit> {
    hp.validate()?;
    let d = x.cols();
    let mut params = vec![0.0; d + 1];
    if hp.init_scale > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in &mut params {
            *p = rng.random_range(-hp.init_scale..=hp.init_scale);
        }
    }
    let (mut loss, mut grad) = binary_objective(x, targets, &params, hp.l2);
    let mut losses = vec![loss];
    let mut lr = hp.learning_rate;
    let mut converged = false;
    let mut epochs = 0;
    'epochs: while epochs < hp.max_epochs {
        if norm(&grad) < hp.tol {
            converged = true;
            break;
        }
        loop {
            let candidate: Vec<f64> = params.iter().zip(&grad).map(|(p, g)| p - lr * g).collect();
            let (next_loss, next_grad) = binary_objective(x, targets, &candidate, hp.l2);
            if next_loss <= loss {
                params = candidate;
                loss = next_loss;
                grad = next_grad;
                losses.push(loss);
                break;
            }
            lr *= 0.5;
            if lr < 1e-18 {
                break 'epochs;
            }
        }
        epochs += 1;
    }
    if !converged && norm(&grad) < hp.tol {
        converged = true;
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::Numeric("logistic regression produced non-finite weights".into()));
    }
    Ok(BinaryFit {
        params,
        epochs,
        losses,
        converged,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// One weight row per class: `d` feature weights then the bias.
#[derive(Clone, Debug, PartialEq)]
pub struct LogRegModel {
    classes: Vec<String>,
    weights: Matrix,
    hyperparams: Hyperparams,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub index: usize,
    pub label: String,
    /// `sigmoid(w_c·x + b_c)` per class, in class order.
    pub scores: Vec<f64>,
}

impl LogRegModel {
    pub fn new(classes: Vec<String>, weights: Matrix, hyperparams: Hyperparams) -> Result<Self> {
        if classes.len() < 2 {
            return Err(Error::invalid("a classifier needs at least 2 classes"));
        }
        if weights.rows() != classes.len() || weights.cols() < 2 {
            return Err(Error::Shape(format!(
                "weights {:?} do not fit {} classes",
                weights.shape(),
                classes.len()
            )));
        }
        if !weights.is_finite() {
            return Err(Error::NonFinite("classifier weights".into()));
        }
        Ok(LogRegModel {
            classes,
            weights,
            hyperparams,
        })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn hyperparams(&self) -> &Hyperparams {
        &self.hyperparams
    }

    /// Feature dimension (excludes the bias column).
    pub fn dim(&self) -> usize {
        self.weights.cols() - 1
    }

    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Shape(format!(
                "vector of length {} for a classifier of dimension {}",
                x.len(),
                self.dim()
            )));
        }
        let d = self.dim();
        Ok((0..self.classes.len())
            .map(|c| {
                let row = self.weights.row(c);
                let z = row[..d].iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + row[d];
                sigmoid(z)
            })
            .collect())
    }

    pub fn to_text(&self) -> String {
        let hp = &self.hyperparams;
        let mut out = format!("{MODEL_HEADER} {VERSION}\n");
        let _ = writeln!(out, "classes {}", self.classes.len());
        let _ = writeln!(out, "dim {}", self.dim());
        let _ = writeln!(out, "l2 {}", hp.l2);
        let _ = writeln!(out, "learning_rate {}", hp.learning_rate);
        let _ = writeln!(out, "max_epochs {}", hp.max_epochs);
        let _ = writeln!(out, "tol {}", hp.tol);
        let _ = writeln!(out, "seed {}", hp.seed);
        let _ = writeln!(out, "init_scale {}", hp.init_scale);
        for (c, class) in self.classes.iter().enumerate() {
            out.push_str(class);
            out.push('\t');
            let row: Vec<String> = self.weights.row(c).iter().map(|w| w.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(input: &str, origin: &str) -> Result<Self> {
        let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
        check_header(lines.next().map(|(_, l)| l), MODEL_HEADER, VERSION, origin)?;
        let mut field = |name: &str| -> Result<(usize, String)> {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::parse(origin, 0, format!("missing `{name}` field")))?;
            match line.split_once(' ') {
                Some((key, value)) if key == name => Ok((ln, value.trim().to_string())),
                _ => Err(Error::parse(origin, ln, format!("expected `{name} <value>`"))),
            }
        };
        fn num<T: std::str::FromStr>(origin: &str, (ln, v): (usize, String)) -> Result<T> {
            v.parse().map_err(|_| Error::parse(origin, ln, format!("invalid value `{v}`")))
        }
        let n_classes: usize = num(origin, field("classes")?)?;
        let dim: usize = num(origin, field("dim")?)?;
        let hyperparams = Hyperparams {
            l2: num(origin, field("l2")?)?,
            learning_rate: num(origin, field("learning_rate")?)?,
            max_epochs: num(origin, field("max_epochs")?)?,
            tol: num(origin, field("tol")?)?,
            seed: num(origin, field("seed")?)?,
            init_scale: num(origin, field("init_scale")?)?,
        };
        let mut classes = Vec::with_capacity(n_classes);
        let mut data = Vec::with_capacity(n_classes * (dim + 1));
        for (ln, line) in lines.take(n_classes) {
            let (class, weights) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, ln, "expected `class<TAB>weights`"))?;
            let row: Vec<f64> = weights
                .split(' ')
                .map(|w| w.parse::<f64>().map_err(|_| Error::parse(origin, ln, format!("invalid weight `{w}`"))))
                .collect::<Result<_>>()?;
            if row.len() != dim + 1 {
                return Err(Error::parse(
                    origin,
                    ln,
                    format!("expected {} weights, found {}", dim + 1, row.len()),
                ));
            }
            classes.push(class.to_string());
            data.extend(row);
        }
        if classes.len() != n_classes {
            return Err(Error::parse(origin, 0, format!("expected {n_classes} class rows")));
        }
        LogRegModel::new(classes, Matrix::from_vec(n_classes, dim + 1, data)?, hyperparams)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }
}

/// Trains with classes in first-occurrence order of `labels`.
pub fn train_ovr_logreg<S: AsRef<str>>(x: &Matrix, labels: &[S], hp: &Hyperparams) -> Result<LogRegModel> {
    let mut classes: Vec<String> = Vec::new();
    for l in labels {
        if !classes.iter().any(|c| c == l.as_ref()) {
            classes.push(l.as_ref().to_string());
        }
    }
    train_ovr_logreg_with(x, labels, &classes, hp, Exec::default()).map(|(model, _)| model)
}

/// Trains one binary model per entry of `classes` (which may include
/// classes absent from `labels`; those fit an all-negative problem).
/// Class `c` draws its initialization from `hp.seed + c`.
pub fn train_ovr_logreg_with<S: AsRef<str>>(
    x: &Matrix,
    labels: &[S],
    classes: &[String],
    hp: &Hyperparams,
    exec: Exec,
) -> Result<(LogRegModel, Vec<BinaryFit>)> {
    hp.validate()?;
    if x.rows() != labels.len() {
        return Err(Error::Shape(format!(
            "{} feature rows for {} labels",
            x.rows(),
            labels.len()
        )));
    }
    if x.rows() < 2 {
        return Err(Error::invalid("need at least 2 training examples"));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("training features".into()));
    }
    let indices: Vec<usize> = labels
        .iter()
        .map(|l| {
            classes
                .iter()
                .position(|c| c == l.as_ref())
                .ok_or_else(|| Error::invalid(format!("label `{}` is not a known class", l.as_ref())))
        })
        .collect::<Result<_>>()?;
    let first = indices[0];
    if indices.iter().all(|&i| i == first) {
        return Err(Error::invalid("training labels contain a single class"));
    }

    let fits = exec.try_map_range(classes.len(), |c| {
        let targets: Vec<f64> = indices.iter().map(|&i| if i == c { 1.0 } else { 0.0 }).collect();
        fit_binary(x, &targets, hp, hp.seed.wrapping_add(c as u64))
    })?;
    let d = x.cols();
    let mut weights = Matrix::zeros(classes.len(), d + 1);
    for (c, fit) in fits.iter().enumerate() {
        weights.row_mut(c).copy_from_slice(&fit.params);
    }
    Ok((LogRegModel::new(classes.to_vec(), weights, *hp)?, fits))
}

/// Highest score wins; ties go to the earliest class.
pub fn predict(model: &LogRegModel, x: &[f64]) -> Result<Prediction> {
    let scores = model.scores(x)?;
    let index = argmax(&scores);
    Ok(Prediction {
        index,
        label: model.classes[index].clone(),
        scores,
    })
}

pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Predicted class index for every row of `x`.
pub fn predict_batch(model: &LogRegModel, x: &Matrix, exec: Exec) -> Result<Vec<usize>> {
    exec.try_map_range(x.rows(), |i| predict(model, x.row(i)).map(|p| p.index))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_data() -> (Matrix, Vec<&'static str>) {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            let jitter = i as f64 * 0.01;
            rows.push(vec![-1.0 - jitter]);
            labels.push("A");
            rows.push(vec![1.0 + jitter]);
            labels.push("B");
        }
        (Matrix::from_rows(&rows).unwrap(), labels)
    }

    #[test]
    fn separable_line_is_learned() {
        let (x, labels) = line_data();
        let model = train_ovr_logreg(&x, &labels, &Hyperparams::default()).unwrap();
        for (i, l) in labels.iter().enumerate() {
            assert_eq!(predict(&model, x.row(i)).unwrap().label, *l);
        }
    }

    #[test]
    fn single_class_rejected() {
        let x = Matrix::from_rows(&[[1.0], [2.0]]).unwrap();
        assert!(train_ovr_logreg(&x, &["A", "A"], &Hyperparams::default()).is_err());
        assert!(train_ovr_logreg(&x, &["A"], &Hyperparams::default()).is_err());
    }

    #[test]
    fn symmetric_data_has_zero_bias() {
        let (x, labels) = line_data();
        let model = train_ovr_logreg(&x, &labels, &Hyperparams::default()).unwrap();
        for c in 0..2 {
            assert!(model.weights()[(c, 1)].abs() < 1e-6, "bias {}", model.weights()[(c, 1)]);
        }
    }

    #[test]
    fn strong_margin_scores() {
        let weights = Matrix::from_rows(&[[10.0, 0.0], [-10.0, 0.0]]).unwrap();
        let model = LogRegModel::new(vec!["A".into(), "B".into()], weights, Hyperparams::default()).unwrap();
        let p = predict(&model, &[1.0]).unwrap();
        assert_eq!(p.label, "A");
        assert!(p.scores[0] > 0.9999);
    }

    #[test]
    fn neutral_model_picks_first_class() {
        let model = LogRegModel::new(
            vec!["X".into(), "Y".into(), "Z".into()],
            Matrix::zeros(3, 3),
            Hyperparams::default(),
        )
        .unwrap();
        let p = predict(&model, &[0.3, -2.0]).unwrap();
        assert_eq!(p.scores, vec![0.5; 3]);
        assert_eq!(p.label, "X");
        assert!(predict(&model, &[0.0]).is_err());
    }

    #[test]
    fn class_rows_are_independent() {
        let w = Matrix::from_rows(&[[1.0, 0.5, -0.2], [-0.3, 2.0, 0.1], [0.7, -1.0, 0.0]]).unwrap();
        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let a = LogRegModel::new(names(&["A", "B", "C"]), w.clone(), Hyperparams::default()).unwrap();
        let swapped = Matrix::from_rows(&[w.row(0), w.row(2), w.row(1)]).unwrap();
        let b = LogRegModel::new(names(&["A", "C", "B"]), swapped, Hyperparams::default()).unwrap();
        let x = [0.4, -0.9];
        let (sa, sb) = (a.scores(&x).unwrap(), b.scores(&x).unwrap());
        assert_eq!(sa[0], sb[0]);
        assert_eq!(sa[1], sb[2]);
        assert_eq!(sa[2], sb[1]);
    }

    #[test]
    fn loss_never_increases() {
        let (x, labels) = line_data();
        let classes = vec!["A".to_string(), "B".to_string()];
        let hp = Hyperparams {
            learning_rate: 50.0,
            max_epochs: 200,
            ..Default::default()
        };
        let (_, fits) = train_ovr_logreg_with(&x, &labels, &classes, &hp, Exec::Sequential).unwrap();
        for fit in fits {
            assert!(fit.losses.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn model_file_round_trip() {
        let (x, labels) = line_data();
        let model = train_ovr_logreg(&x, &labels, &Hyperparams::default()).unwrap();
        let back = LogRegModel::from_text(&model.to_text(), "m").unwrap();
        assert_eq!(back, model);
        let err = LogRegModel::from_text("qembed-logreg-model v0\n", "m").unwrap_err();
        assert!(matches!(err, Error::Version(_)));
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = Matrix::from_rows(&[[1.0], [2.0], [3.0]]).unwrap();
        assert!(train_ovr_logreg(&x, &["A", "B"], &Hyperparams::default()).is_err());
        let hp = Hyperparams {
            learning_rate: 0.0,
            ..Default::default()
        };
        assert!(train_ovr_logreg(&x, &["A", "B", "A"], &hp).is_err());
    }

    #[test]
    fn exec_modes_agree() {
        let (x, labels) = line_data();
        let classes = vec!["A".to_string(), "B".to_string()];
        let hp = Hyperparams::default();
        let (a, _) = train_ovr_logreg_with(&x, &labels, &classes, &hp, Exec::Sequential).unwrap();
        let (b, _) = train_ovr_logreg_with(&x, &labels, &classes, &hp, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
