use oberbeck_spectral::{dealias, GridSpec, Rank, SpectralField};

/// Scalar, vector, scalar: (b, u, θ) or (a, u, R).
#[derive(Clone, Debug, PartialEq)]
pub struct Triple {
    pub s1: SpectralField,
    pub u: SpectralField,
    pub s2: SpectralField,
}

impl Triple {
    pub fn zeros(grid: GridSpec) -> Self {
        Triple {
            s1: SpectralField::zeros(grid, Rank::Scalar),
            u: SpectralField::zeros(grid, Rank::Vector),
            s2: SpectralField::zeros(grid, Rank::Scalar),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.s1.grid
    }

    pub fn add(&self, o: &Triple) -> Triple {
        Triple { s1: self.s1.add(&o.s1), u: self.u.add(&o.u), s2: self.s2.add(&o.s2) }
    }

    pub fn sub(&self, o: &Triple) -> Triple {
        Triple { s1: self.s1.sub(&o.s1), u: self.u.sub(&o.u), s2: self.s2.sub(&o.s2) }
    }

    pub fn scale(&self, s: f64) -> Triple {
        Triple { s1: self.s1.scale(s), u: self.u.scale(s), s2: self.s2.scale(s) }
    }

    pub fn dealiased(&self) -> Triple {
        Triple { s1: dealias(&self.s1), u: dealias(&self.u), s2: dealias(&self.s2) }
    }

    /// L² norm of the stacked fields.
    pub fn norm_l2(&self) -> f64 {
        (self.s1.norm_l2().powi(2) + self.u.norm_l2().powi(2) + self.s2.norm_l2().powi(2)).sqrt()
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.s1.hermitian_defect().max(self.u.hermitian_defect()).max(self.s2.hermitian_defect())
    }
}

/// Heat-conducting state; `b = a − V` is the modified density deviation.
#[derive(Clone, Debug, PartialEq)]
pub struct ConductingState {
    pub b: SpectralField,
    pub u: SpectralField,
    pub theta: SpectralField,
    pub t: f64,
}

/// Non-conducting state; the pressure deviation is `P = 1 + ε(R + V)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NonConductingState {
    pub a: SpectralField,
    pub u: SpectralField,
    pub r: SpectralField,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoussinesqState {
    pub theta: SpectralField,
    pub v: SpectralField,
    pub t: f64,
}

impl ConductingState {
    pub fn zeros(grid: GridSpec) -> Self {
        Self::from_triple(Triple::zeros(grid), 0.0)
    }

    pub fn triple(&self) -> Triple {
        Triple { s1: self.b.clone(), u: self.u.clone(), s2: self.theta.clone() }
    }

    pub fn from_triple(x: Triple, t: f64) -> Self {
        ConductingState { b: x.s1, u: x.u, theta: x.s2, t }
    }

    pub fn named_fields(&self) -> [(&'static str, &SpectralField); 3] {
        [("b", &self.b), ("u", &self.u), ("theta", &self.theta)]
    }
}

impl NonConductingState {
    pub fn zeros(grid: GridSpec) -> Self {
        Self::from_triple(Triple::zeros(grid), 0.0)
    }

    pub fn triple(&self) -> Triple {
        Triple { s1: self.a.clone(), u: self.u.clone(), s2: self.r.clone() }
    }

    pub fn from_triple(x: Triple, t: f64) -> Self {
        NonConductingState { a: x.s1, u: x.u, r: x.s2, t }
    }

    pub fn named_fields(&self) -> [(&'static str, &SpectralField); 3] {
        [("a", &self.a), ("u", &self.u), ("R", &self.r)]
    }
}

impl BoussinesqState {
    pub fn zeros(grid: GridSpec) -> Self {
        BoussinesqState {
            theta: SpectralField::zeros(grid, Rank::Scalar),
            v: SpectralField::zeros(grid, Rank::Vector),
            t: 0.0,
        }
    }

    pub fn named_fields(&self) -> [(&'static str, &SpectralField); 2] {
        [("Theta", &self.theta), ("v", &self.v)]
    }
}
