import json

from django import forms
from django.core.exceptions import ValidationError

from .specs import DcScbmSpec, ScbmSpec


def _matrix_shape(value):
    if not isinstance(value, list) or not value or not all(isinstance(row, list) for row in value):
        return None
    widths = {len(row) for row in value}
    return (len(value), widths.pop()) if len(widths) == 1 else None


class BlockModelSpecForm(forms.Form):
    """
    Valida un documento JSON de spec {n, ky, kz, b, row_sizes, col_sizes, theta_y?, theta_z?}.

    Los errores quedan asociados al campo que los produce, así el comando
    puede informar por ejemplo qué falla en `row_sizes`.
    """
    n = forms.IntegerField(min_value=1)
    ky = forms.IntegerField(min_value=1)
    kz = forms.IntegerField(min_value=1)
    b = forms.JSONField()
    row_sizes = forms.JSONField()
    col_sizes = forms.JSONField()
    theta_y = forms.JSONField(required=False)
    theta_z = forms.JSONField(required=False)

    def clean_b(self):
        b = self.cleaned_data.get('b')
        if _matrix_shape(b) is None:
            raise ValidationError('⚠️ b debe ser una matriz (lista de filas de igual largo).')
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for row in b for x in row):
            raise ValidationError('⚠️ b debe contener sólo números.')
        if any(x < 0 or x > 1 for row in b for x in row):
            raise ValidationError('⚠️ Todas las entradas de b deben estar en [0, 1].')
        return b

    def _clean_sizes(self, name):
        sizes = self.cleaned_data.get(name)
        if not isinstance(sizes, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in sizes):
            raise ValidationError(f'⚠️ {name} debe ser una lista de enteros.')
        if any(x < 1 for x in sizes):
            raise ValidationError(f'⚠️ {name} debe contener enteros positivos (clusters no vacíos).')
        return sizes

    def clean_row_sizes(self):
        return self._clean_sizes('row_sizes')

    def clean_col_sizes(self):
        return self._clean_sizes('col_sizes')

    def _clean_theta(self, name):
        theta = self.cleaned_data.get(name)
        if theta is None:
            return None
        if not isinstance(theta, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in theta):
            raise ValidationError(f'⚠️ {name} debe ser una lista de números.')
        return theta

    def clean_theta_y(self):
        return self._clean_theta('theta_y')

    def clean_theta_z(self):
        return self._clean_theta('theta_z')

    def clean(self):
        """
        Validaciones cruzadas:
        1. ky <= kz
        2. forma de b igual a ky×kz
        3. tamaños de clusters coherentes con ky, kz y n
        4. invariantes del modelo (identificabilidad de theta, probabilidades <= 1)
        """
        cleaned = super().clean()
        n, ky, kz = cleaned.get('n'), cleaned.get('ky'), cleaned.get('kz')
        if ky is not None and kz is not None and ky > kz:
            self.add_error('kz', f'⚠️ Se requiere ky <= kz (ky = {ky}, kz = {kz}).')
        b = cleaned.get('b')
        if b is not None and ky is not None and kz is not None and _matrix_shape(b) != (ky, kz):
            self.add_error('b', f'⚠️ b debe ser {ky}×{kz}.')
        for name, k in (('row_sizes', ky), ('col_sizes', kz)):
            sizes = cleaned.get(name)
            if sizes is None or k is None or n is None:
                continue
            if len(sizes) != k:
                self.add_error(name, f'⚠️ {name} debe tener {k} elementos, tiene {len(sizes)}.')
            elif sum(sizes) != n:
                self.add_error(name, f'⚠️ {name} debe sumar n = {n} (suma {sum(sizes)}).')
        if (cleaned.get('theta_y') is None) != (cleaned.get('theta_z') is None):
            self.add_error(None, '⚠️ theta_y y theta_z deben indicarse juntos.')
        if not self.errors:
            try:
                self.spec = self._build_spec(cleaned)
            except ValidationError as error:
                self.add_error(None, error)
        return cleaned

    def _build_spec(self, cleaned):
        base = ScbmSpec(
            n=cleaned['n'],
            ky=cleaned['ky'],
            kz=cleaned['kz'],
            b=cleaned['b'],
            row_sizes=cleaned['row_sizes'],
            col_sizes=cleaned['col_sizes'],
        )
        if cleaned.get('theta_y') is None:
            return base
        return DcScbmSpec(base=base, theta_y=cleaned['theta_y'], theta_z=cleaned['theta_z'])

    def errors_as_text(self):
        lines = []
        for name, messages in self.errors.items():
            label = 'spec' if name == '__all__' else name
            lines.extend(f'{label}: {message}' for message in messages)
        return '\n'.join(lines)


def spec_from_document(document):
    """Spec validado a partir de un dict; ValidationError con los errores por campo."""
    form = BlockModelSpecForm(data=document)
    if not form.is_valid():
        raise ValidationError(form.errors_as_text())
    return form.spec


def read_spec(path):
    with open(path, encoding='utf-8') as handle:
        try:
            document = json.load(handle)
        except json.JSONDecodeError as error:
            raise ValidationError(f'El archivo de spec no es JSON válido: {error}') from error
    if not isinstance(document, dict):
        raise ValidationError('El archivo de spec debe contener un objeto JSON.')
    return spec_from_document(document)
