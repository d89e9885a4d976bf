//! Python bindings: distributions, dictionary sets and the block codec.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use rice_marlin as rm;

fn err(e: rm::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn family(name: &str) -> PyResult<rm::Family> {
    name.parse().map_err(err)
}

fn distribution(probs: Vec<f64>) -> PyResult<rm::SymbolDistribution> {
    rm::SymbolDistribution::new(&probs).map_err(err)
}

/// Entropy in bits of a 256-entry probability vector.
#[pyfunction]
fn entropy(probs: Vec<f64>) -> PyResult<f64> {
    Ok(distribution(probs)?.entropy())
}

/// Member of a synthetic family whose entropy is `fraction * 8` bits.
#[pyfunction]
fn make_distribution(family_name: &str, fraction: f64) -> PyResult<Vec<f64>> {
    let d = rm::make_distribution(rm::SyntheticFamily::new(family(family_name)?, fraction)).map_err(err)?;
    Ok(d.probs().to_vec())
}

#[pyfunction]
fn sample<'py>(py: Python<'py>, probs: Vec<f64>, n: usize, seed: u64) -> PyResult<Bound<'py, PyBytes>> {
    let d = distribution(probs)?;
    Ok(PyBytes::new(py, &rm::sample(&d, n, seed)))
}

#[pyfunction]
fn empirical_histogram(message: &[u8]) -> PyResult<Vec<f64>> {
    Ok(rm::empirical_histogram(message).map_err(err)?.probs().to_vec())
}

#[pyfunction]
fn shift_efficiency_bound(probs: Vec<f64>, shift: u8) -> PyResult<f64> {
    Ok(rm::shift_efficiency_bound(&distribution(probs)?, shift))
}

#[pyfunction]
fn pack_reminders<'py>(py: Python<'py>, message: &[u8], shift: u8) -> PyResult<Bound<'py, PyBytes>> {
    if shift > 8 {
        return Err(PyValueError::new_err("shift must be at most 8"));
    }
    Ok(PyBytes::new(py, &rm::pack_reminders(message, shift)))
}

/// One dictionary of a set.
#[pyclass(frozen, name = "Dictionary")]
struct PyDictionary {
    inner: rm::MarlinDictionary,
}

#[pymethods]
impl PyDictionary {
    /// Builds the best dictionary for a probability vector.
    #[staticmethod]
    #[pyo3(signature = (probs, k=8, o=4, block_n=4096))]
    fn best_for(probs: Vec<f64>, k: u8, o: u8, block_n: usize) -> PyResult<Self> {
        let params = rm::CodeParams::new(k, o).map_err(err)?;
        let inner = rm::best_dictionary_for(&distribution(probs)?, params, block_n, "python").map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn k(&self) -> u8 {
        self.inner.params().k()
    }

    #[getter]
    fn o(&self) -> u8 {
        self.inner.params().o()
    }

    #[getter]
    fn shift(&self) -> u8 {
        self.inner.shift()
    }

    #[getter]
    fn threshold(&self) -> f64 {
        self.inner.threshold()
    }

    #[getter]
    fn source_id(&self) -> String {
        self.inner.source_id().to_string()
    }

    #[getter]
    fn abr_estimate(&self) -> f64 {
        self.inner.abr_estimate()
    }

    #[getter]
    fn mean_word_len(&self) -> f64 {
        self.inner.mean_word_len()
    }

    #[getter]
    fn stationary(&self) -> Vec<f64> {
        self.inner.stationary().to_vec()
    }

    /// Estimated bits per symbol on another distribution.
    #[pyo3(signature = (probs, block_n=4096))]
    fn abr_for(&self, probs: Vec<f64>, block_n: usize) -> PyResult<f64> {
        self.inner.abr_estimate_for(&distribution(probs)?, block_n).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Dictionary(source={}, K={}, O={}, S={}, abr={:.4})",
            self.inner.source_id(),
            self.k(),
            self.o(),
            self.shift(),
            self.inner.abr_estimate()
        )
    }
}

#[pyclass(frozen, name = "DictionarySet")]
struct PyDictionarySet {
    inner: rm::DictionarySet,
}

#[pymethods]
impl PyDictionarySet {
    /// Builds a set over the default source grid.
    #[staticmethod]
    #[pyo3(signature = (k=8, o=4, block_size=4096))]
    fn build(py: Python<'_>, k: u8, o: u8, block_size: usize) -> PyResult<Self> {
        let config = rm::SetConfig {
            k,
            o,
            block_size,
            ..rm::SetConfig::default()
        };
        let inner = py.detach(|| rm::build_dictionary_set(&config)).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(data: &[u8]) -> PyResult<Self> {
        Ok(Self {
            inner: rm::load_dictset(data).map_err(err)?,
        })
    }

    fn save<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &rm::save_dictset(&self.inner))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn dictionary(&self, index: usize) -> PyResult<PyDictionary> {
        let inner = self
            .inner
            .get(index)
            .cloned()
            .ok_or_else(|| PyValueError::new_err(format!("no dictionary {index}")))?;
        Ok(PyDictionary { inner })
    }

    /// Index of the best dictionary for a probability vector.
    #[pyo3(signature = (probs, block_n=4096))]
    fn select(&self, probs: Vec<f64>, block_n: usize) -> PyResult<usize> {
        Ok(rm::select_dictionary(&self.inner, &distribution(probs)?, block_n))
    }
}

#[pyclass(frozen, name = "Codec")]
struct PyCodec {
    inner: rm::Codec,
}

#[pymethods]
impl PyCodec {
    #[new]
    fn new(set: &PyDictionarySet) -> Self {
        Self {
            inner: rm::Codec::new(set.inner.clone()),
        }
    }

    #[pyo3(signature = (data, block_size=4096))]
    fn compress<'py>(&self, py: Python<'py>, data: &[u8], block_size: usize) -> PyResult<Bound<'py, PyBytes>> {
        let out = py.detach(|| self.inner.compress(data, block_size, true)).map_err(err)?;
        Ok(PyBytes::new(py, &out))
    }

    fn compress_image<'py>(&self, py: Python<'py>, pgm: &[u8]) -> PyResult<Bound<'py, PyBytes>> {
        let out = py.detach(|| self.inner.compress_image(pgm, true)).map_err(err)?;
        Ok(PyBytes::new(py, &out))
    }

    fn decompress<'py>(&self, py: Python<'py>, data: &[u8]) -> PyResult<Bound<'py, PyBytes>> {
        let out = py.detach(|| self.inner.decompress(data, true)).map_err(err)?;
        Ok(PyBytes::new(py, &out))
    }

    /// Serialized block for `message`; its length is needed to decode it.
    fn compress_block<'py>(&self, py: Python<'py>, message: &[u8]) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.inner.compress_block(message))
    }

    fn decompress_block<'py>(&self, py: Python<'py>, block: &[u8], n: usize) -> PyResult<Bound<'py, PyBytes>> {
        let out = self.inner.decompress_block(block, n).map_err(err)?;
        Ok(PyBytes::new(py, &out))
    }
}

#[pymodule]
fn ricemarlin(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(make_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(shift_efficiency_bound, m)?)?;
    m.add_function(wrap_pyfunction!(pack_reminders, m)?)?;
    m.add_class::<PyDictionary>()?;
    m.add_class::<PyDictionarySet>()?;
    m.add_class::<PyCodec>()?;
    Ok(())
}
