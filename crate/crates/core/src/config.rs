//! Model configuration files, built-in models, and the JSON formats used to
//! exchange tuples and Clifford generators.
//!
//! A configuration names a model, its parameters and a scaling:
//!
//! ```json
//! {"model": "lattice4d", "params": {"n": 3, "t1": [0.8, 0.0]}, "scale": {"kappa": 0.1}}
//! ```
//!
//! Complex numbers are `[re, im]` pairs throughout.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clifford::{build_rep, gamma5_explicit, pauli_rep, CliffordRep, Construction};
use crate::error::{Error, Result};
use crate::linalg::{c64, CsrMatrix};
use crate::models::{example_abc, fuzzy_sphere, haldane, lattice4d, HaldaneParams, LatticeModel, Lattice4dParams, Site};
use crate::tuple::{HermitianTuple, ProbePoint};

/// Format tag written into sparse model files.
pub const COO_FORMAT: &str = "localizer-lab/coo-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "params", rename_all = "lowercase")]
pub enum ModelConfig {
    Haldane(HaldaneParams),
    Lattice4d(Lattice4dParams),
    Abc { t: f64 },
    Fuzzy { n: usize },
    Pauli,
    /// Irreducible Clifford generators as a tuple of their own.
    Gamma {
        d: usize,
        #[serde(default)]
        explicit: bool,
    },
}

/// Scaling coefficients. Lattice models read `kappa` (4D, energy/distance) or
/// `kappa_x` (1/distance) and `kappa_h` (1/energy) for 2D; `kappas` overrides
/// both with one coefficient per matrix.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappas: Option<Vec<f64>>,
}

/// Default `κ` for 4D lattices, in units of `t/a`.
pub const DEFAULT_KAPPA_4D: f64 = 0.1;
/// Default `κ_X` for 2D lattices, in units of `1/a`.
pub const DEFAULT_KAPPA_X: f64 = 1.0;
/// Default `κ_H` for 2D lattices, in units of `1/t`.
pub const DEFAULT_KAPPA_H: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub model: ModelConfig,
    #[serde(default)]
    pub scale: ScaleSpec,
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("model config: {e}")))
    }

    /// Parses `builtin:<name>`, with or without the prefix.
    ///
    /// Names: `pauli`, `gamma5`, `gamma:<d>`, `abc:<t>`, `fuzzy:<n>`,
    /// `haldane` (12×12 figure sample), `ai:<N>` and `a:<N>` (4D lattices).
    pub fn builtin(name: &str) -> Result<Self> {
        let name = name.strip_prefix("builtin:").unwrap_or(name);
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        let bad = || Error::InvalidArgument(format!("unknown builtin model '{name}'"));
        let num = |what: &str| -> Result<f64> {
            let a = arg.ok_or_else(|| Error::InvalidArgument(format!("builtin '{head}' needs :<{what}>")))?;
            a.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad {what} '{a}' in builtin '{name}'")))
        };
        let count = |what: &str| -> Result<usize> {
            let a = arg.ok_or_else(|| Error::InvalidArgument(format!("builtin '{head}' needs :<{what}>")))?;
            a.parse::<usize>().map_err(|_| Error::InvalidArgument(format!("bad {what} '{a}' in builtin '{name}'")))
        };
        let model = match head {
            "pauli" if arg.is_none() => ModelConfig::Pauli,
            "gamma5" if arg.is_none() => ModelConfig::Gamma { d: 5, explicit: true },
            "gamma" => ModelConfig::Gamma { d: count("d")?, explicit: false },
            "abc" => ModelConfig::Abc { t: num("t")? },
            "fuzzy" => ModelConfig::Fuzzy { n: count("n")? },
            "haldane" if arg.is_none() => ModelConfig::Haldane(HaldaneParams::figure_sample()),
            "ai" => ModelConfig::Lattice4d(Lattice4dParams::class_ai(count("N")?)),
            "a" => ModelConfig::Lattice4d(Lattice4dParams::class_a(count("N")?)),
            _ => return Err(bad()),
        };
        Ok(Self { model, scale: ScaleSpec::default() })
    }

    /// Scaling coefficients for lattice models, one per tuple matrix.
    pub fn kappas(&self) -> Result<Option<Vec<f64>>> {
        let s = &self.scale;
        let expected = match &self.model {
            ModelConfig::Haldane(_) => 3,
            ModelConfig::Lattice4d(_) => 5,
            _ => {
                if s != &ScaleSpec::default() {
                    return Err(Error::InvalidArgument("scale applies to lattice models only".into()));
                }
                return Ok(None);
            }
        };
        if let Some(k) = &s.kappas {
            if k.len() != expected {
                return Err(Error::InvalidArgument(format!("scale.kappas needs {expected} entries, got {}", k.len())));
            }
            return Ok(Some(k.clone()));
        }
        let kappas = match &self.model {
            ModelConfig::Haldane(_) => {
                if s.kappa.is_some() {
                    return Err(Error::InvalidArgument("2D models take kappa_x and kappa_h, not kappa".into()));
                }
                let kx = s.kappa_x.unwrap_or(DEFAULT_KAPPA_X);
                vec![kx, kx, s.kappa_h.unwrap_or(DEFAULT_KAPPA_H)]
            }
            _ => {
                if s.kappa_x.is_some() || s.kappa_h.is_some() {
                    return Err(Error::InvalidArgument("4D models take kappa, not kappa_x/kappa_h".into()));
                }
                let k = s.kappa.unwrap_or(DEFAULT_KAPPA_4D);
                vec![k, k, k, k, 1.0]
            }
        };
        if kappas.iter().any(|k| !k.is_finite() || *k <= 0.0) {
            return Err(Error::InvalidArgument(format!("scaling coefficients must be positive, got {kappas:?}")));
        }
        Ok(Some(kappas))
    }

    pub fn build(&self) -> Result<LoadedModel> {
        LoadedModel::from_spec(self.clone())
    }
}

/// Which Clifford representation to pair with a tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepChoice {
    /// The explicit five generators for 4D lattices, the recursive construction otherwise.
    Auto,
    Pauli,
    Gamma5,
    Recursive,
}

impl FromStr for RepChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "pauli" => Ok(Self::Pauli),
            "gamma5" => Ok(Self::Gamma5),
            "recursive" => Ok(Self::Recursive),
            _ => Err(Error::InvalidArgument(format!("unknown rep '{s}' (auto|pauli|gamma5|recursive)"))),
        }
    }
}

/// A tuple ready to probe, with whatever produced it.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub spec: Option<ModelSpec>,
    pub tuple: HermitianTuple,
    /// Present for lattice models: maps physical `(x…, E)` to λ.
    pub kappas: Option<Vec<f64>>,
    pub lattice: Option<LatticeModel>,
}

impl LoadedModel {
    pub fn from_spec(spec: ModelSpec) -> Result<Self> {
        let kappas = spec.kappas()?;
        let (tuple, lattice) = match &spec.model {
            ModelConfig::Haldane(p) => {
                check_lattice(p.n1 >= 1 && p.n2 >= 1 && p.t != 0.0, "haldane needs n1, n2 >= 1 and t != 0")?;
                let m = haldane(p);
                (m.scaled_tuple(kappas.as_deref().unwrap())?.tuple, Some(m))
            }
            ModelConfig::Lattice4d(p) => {
                check_lattice(p.n >= 1, "lattice4d needs n >= 1")?;
                let m = lattice4d(p);
                (m.scaled_tuple(kappas.as_deref().unwrap())?.tuple, Some(m))
            }
            ModelConfig::Abc { t } => (example_abc(*t), None),
            ModelConfig::Fuzzy { n } => {
                check_lattice(*n >= 2, "fuzzy sphere needs n >= 2")?;
                (fuzzy_sphere(*n), None)
            }
            ModelConfig::Pauli => (HermitianTuple::from_rep(&pauli_rep()).with_label("pauli"), None),
            ModelConfig::Gamma { d, explicit } => {
                let rep = if *explicit {
                    if *d != 5 {
                        return Err(Error::InvalidArgument("explicit generators exist for d = 5 only".into()));
                    }
                    gamma5_explicit()
                } else {
                    build_rep(*d)?
                };
                (HermitianTuple::from_rep(&rep).with_label(format!("gamma d={d}")), None)
            }
        };
        Ok(Self { spec: Some(spec), tuple, kappas, lattice })
    }

    /// Accepts either a model configuration or a sparse model file.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("model file: {e}")))?;
        if value.get("matrices").is_some() {
            let file: SparseModelFile = serde_json::from_value(value)
                .map_err(|e| Error::InvalidArgument(format!("sparse model file: {e}")))?;
            return file.into_model();
        }
        let spec: ModelSpec =
            serde_json::from_value(value).map_err(|e| Error::InvalidArgument(format!("model config: {e}")))?;
        Self::from_spec(spec)
    }

    pub fn d(&self) -> usize {
        self.tuple.d()
    }

    /// Whether the last matrix is a Hamiltonian, so the last λ-axis reads as energy.
    pub fn energy_last(&self) -> bool {
        self.kappas.is_some()
    }

    pub fn rep(&self, choice: RepChoice) -> Result<CliffordRep> {
        let d = self.d();
        let rep = match choice {
            RepChoice::Auto => {
                let explicit = matches!(
                    self.spec.as_ref().map(|s| &s.model),
                    Some(ModelConfig::Lattice4d(_)) | Some(ModelConfig::Gamma { explicit: true, .. })
                );
                if explicit {
                    gamma5_explicit()
                } else {
                    build_rep(d)?
                }
            }
            RepChoice::Pauli => pauli_rep(),
            RepChoice::Gamma5 => gamma5_explicit(),
            RepChoice::Recursive => build_rep(d)?,
        };
        if rep.d() != d {
            return Err(Error::DimensionMismatch(format!("{choice:?} rep has d = {}, tuple has d = {d}", rep.d())));
        }
        Ok(rep)
    }

    /// Maps physical coordinates `(x…, E)` to λ; identity for non-lattice tuples.
    pub fn lambda_from_physical(&self, physical: &[f64]) -> Result<ProbePoint> {
        let p = ProbePoint::new(match &self.kappas {
            Some(k) => {
                if k.len() != physical.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "probe has {} coordinates, expected {}",
                        physical.len(),
                        k.len()
                    )));
                }
                physical.iter().zip(k).map(|(x, k)| x * k).collect()
            }
            None => physical.to_vec(),
        });
        p.check_dim(self.d())?;
        Ok(p)
    }

    pub fn to_sparse_file(&self) -> SparseModelFile {
        let d = self.d();
        let energy = self.energy_last();
        let matrices = self
            .tuple
            .matrices()
            .iter()
            .enumerate()
            .map(|(j, m)| CooMatrix::from_csr(&axis_matrix_name(j, d, energy), m))
            .collect();
        SparseModelFile {
            format: COO_FORMAT.into(),
            label: self.tuple.label().into(),
            d,
            n: self.tuple.n(),
            kappas: self.kappas.clone(),
            spec: self.spec.clone(),
            matrices,
        }
    }
}

fn check_lattice(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(msg.into()))
    }
}

fn axis_matrix_name(j: usize, d: usize, energy_last: bool) -> String {
    if energy_last && j + 1 == d {
        "H".into()
    } else if energy_last {
        format!("X{}", j + 1)
    } else {
        format!("A{}", j + 1)
    }
}

/// One matrix as COO triplets; duplicate coordinates are summed on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CooMatrix {
    pub name: String,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub values: Vec<[f64; 2]>,
}

impl CooMatrix {
    pub fn from_csr(name: &str, m: &CsrMatrix) -> Self {
        let (mut rows, mut cols, mut values) = (Vec::new(), Vec::new(), Vec::new());
        for (i, j, v) in m.iter() {
            rows.push(i);
            cols.push(j);
            values.push([v.re, v.im]);
        }
        Self { name: name.into(), rows, cols, values }
    }

    pub fn to_csr(&self, n: usize) -> Result<CsrMatrix> {
        if self.rows.len() != self.cols.len() || self.rows.len() != self.values.len() {
            return Err(Error::InvalidArgument(format!("matrix '{}': rows, cols and values differ in length", self.name)));
        }
        if let Some(&bad) = self.rows.iter().chain(&self.cols).find(|&&i| i >= n) {
            return Err(Error::InvalidArgument(format!("matrix '{}': index {bad} out of range for n = {n}", self.name)));
        }
        let triplets = self.rows.iter().zip(&self.cols).zip(&self.values).map(|((&i, &j), v)| (i, j, c64::new(v[0], v[1])));
        Ok(CsrMatrix::from_triplets(n, n, triplets))
    }
}

/// The tuple exactly as probed (after scaling), in COO form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseModelFile {
    pub format: String,
    pub label: String,
    pub d: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<ModelSpec>,
    pub matrices: Vec<CooMatrix>,
}

impl SparseModelFile {
    pub fn into_model(self) -> Result<LoadedModel> {
        if self.format != COO_FORMAT {
            return Err(Error::InvalidArgument(format!("unsupported format '{}'", self.format)));
        }
        if self.matrices.len() != self.d {
            return Err(Error::InvalidArgument(format!("d = {} but {} matrices given", self.d, self.matrices.len())));
        }
        let mats = self.matrices.iter().map(|m| m.to_csr(self.n)).collect::<Result<Vec<_>>>()?;
        let tuple = HermitianTuple::new(mats, self.label)?;
        if let Some(k) = &self.kappas {
            if k.len() != self.d {
                return Err(Error::InvalidArgument(format!("{} kappas for d = {}", k.len(), self.d)));
            }
        }
        Ok(LoadedModel { spec: self.spec, tuple, kappas: self.kappas, lattice: None })
    }
}

/// `site_id,sublattice,x1,…,xD`.
pub fn write_sites_csv(w: &mut impl Write, sites: &[Site]) -> std::io::Result<()> {
    let dim = sites.first().map_or(0, |s| s.coords.len());
    write!(w, "site_id,sublattice")?;
    for j in 1..=dim {
        write!(w, ",x{j}")?;
    }
    writeln!(w)?;
    for (i, s) in sites.iter().enumerate() {
        write!(w, "{i},{}", s.sublattice)?;
        for x in &s.coords {
            write!(w, ",{x}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Generators as written by the `gamma` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaFile {
    pub d: usize,
    pub r: usize,
    /// `gammas[j][row][col] = [re, im]`.
    pub gammas: Vec<Vec<Vec<[f64; 2]>>>,
    pub orientation: Option<i8>,
    pub construction: Construction,
}

impl GammaFile {
    pub fn from_rep(rep: &CliffordRep) -> Self {
        let r = rep.r();
        let gammas = rep
            .gammas()
            .iter()
            .map(|g| (0..r).map(|i| (0..r).map(|j| [g[(i, j)].re, g[(i, j)].im]).collect()).collect())
            .collect();
        Self { d: rep.d(), r, gammas, orientation: rep.orientation(), construction: rep.construction() }
    }

    pub fn to_rep(&self) -> Result<CliffordRep> {
        let mats = self
            .gammas
            .iter()
            .map(|g| {
                if g.len() != self.r || g.iter().any(|row| row.len() != self.r) {
                    return Err(Error::InvalidArgument(format!("generator is not {0}×{0}", self.r)));
                }
                Ok(faer::Mat::from_fn(self.r, self.r, |i, j| c64::new(g[i][j][0], g[i][j][1])))
            })
            .collect::<Result<Vec<_>>>()?;
        CliffordRep::from_matrices(mats)
    }
}
