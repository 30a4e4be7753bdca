from django import forms

from .validators import validate_fraction, validate_minkowski_p


class BenchmarkOptionsForm(forms.Form):
    """
    Validates the merged benchmark options of a management command.

    - Data comes from CLI flags, a --config file and the IEC_* settings,
      already merged by ``benchmark.conf.resolve_options``.
    - Every field is optional; commands only read the ones they use.
    - Provides custom error messages so usage errors name the option.
    """

    black_level = forms.IntegerField(required=False, min_value=0)
    saturation_level = forms.IntegerField(required=False, min_value=1)
    saturation_fraction = forms.FloatField(required=False, validators=[validate_fraction])
    minkowski_p = forms.FloatField(required=False, validators=[validate_minkowski_p])
    derivative_sigma = forms.FloatField(required=False, min_value=0)
    epsilon_floor = forms.FloatField(required=False, min_value=0)
    face_angle_threshold = forms.FloatField(required=False, min_value=0)
    face_angle_metric = forms.ChoiceField(
        required=False,
        choices=[("recovery", "recovery"), ("reproduction", "reproduction")],
    )
    threads = forms.IntegerField(required=False, min_value=1)

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)

        # Custom error messages for numeric options
        field_msgs = {
            "black_level": "black_level must be a non-negative integer.",
            "saturation_level": "saturation_level must be a positive integer.",
            "saturation_fraction": "saturation_fraction must be a number in (0, 1].",
            "minkowski_p": "minkowski_p must be a number >= 1.",
            "derivative_sigma": "derivative_sigma must be a number >= 0.",
            "epsilon_floor": "epsilon_floor must be a number >= 0.",
            "face_angle_threshold": "face_angle_threshold must be a number >= 0.",
            "threads": "threads must be an integer >= 1.",
        }
        for name, msg in field_msgs.items():
            for code in ("invalid", "min_value"):
                self.fields[name].error_messages[code] = msg

        self.fields["face_angle_metric"].error_messages["invalid_choice"] = (
            "face_angle_metric must be 'recovery' or 'reproduction'."
        )

    def clean(self):
        """
        Check the options that depend on each other.
        """
        cleaned_data = super().clean()
        black_level = cleaned_data.get("black_level")
        saturation_level = cleaned_data.get("saturation_level")

        # The sensor range must be non-empty
        if black_level is not None and saturation_level is not None:
            if black_level >= saturation_level:
                self.add_error("black_level", "black_level must be below saturation_level.")

        return cleaned_data

    def first_error(self):
        """
        Return the first error as "field: message", for usage error output.
        """
        for name, errors in self.errors.items():
            label = "options" if name == "__all__" else name
            return f"{label}: {errors[0]}"
        return ""
